"""Executable-process emission, structural validation, and ontology export.

Bindings are written into the BPMN document as extensionElements in the
`urn:taskweave:binding` namespace, which keeps the document valid for any
BPMN 2.0 tool. Ontology exports are Turtle built deterministically: prefix
block first, subjects in sorted order.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .annotations import AnnotatedProcess
from .bpmn import BPMN_NS, NodeKind, _DEGRADED_TASK_TAGS, _DIRECT_KINDS, _local
from .errors import ContractError, ParseError
from .matcher import BindingSet
from .model import format_datatype
from .registry import ServiceRegistry

BINDING_NS = "urn:taskweave:binding"
WSONTO_NS = "urn:taskweave:wsonto#"
BPONTO_NS = "urn:taskweave:bponto#"

ET.register_namespace("bpmn", BPMN_NS)
ET.register_namespace("tw", BINDING_NS)


def _q(tag: str) -> str:
    return f"{{{BPMN_NS}}}{tag}"


def _tw(tag: str) -> str:
    return f"{{{BINDING_NS}}}{tag}"


@dataclass(frozen=True)
class ExecutableProcess:
    document: str
    manifest: tuple  # (taskId, human summary) pairs


def _find_process(root):
    if _local(root.tag) == "process":
        return root
    process = next(root.iter(_q("process")), None)
    if process is None:
        process = next((el for el in root.iter() if _local(el.tag) == "process"), None)
    return process


def render_graph(process: AnnotatedProcess) -> str:
    """Canonical BPMN for a graph that has no retained source document."""
    graph = process.graph
    root = ET.Element(_q("definitions"))
    proc = ET.SubElement(root, _q("process"), {"id": graph.process_id})
    for node_id in sorted(graph.nodes):
        tag = "task" if graph.nodes[node_id] is NodeKind.GENERIC_TASK else graph.nodes[node_id].value
        attrs = {"id": node_id}
        name = graph.node_names.get(node_id, "")
        if name:
            attrs["name"] = name
        ET.SubElement(proc, _q(tag), attrs)
    for edge in graph.edges:
        ET.SubElement(proc, _q("sequenceFlow"), {
            "id": edge.flow_id, "sourceRef": edge.source_ref, "targetRef": edge.target_ref,
        })
    return ET.tostring(root, encoding="unicode")


def emit_executable(
    process: AnnotatedProcess,
    bindings: BindingSet,
    registry: ServiceRegistry | None = None,
) -> ExecutableProcess:
    """Write binding blocks into the process document.

    Re-emitting replaces earlier blocks instead of stacking them. Endpoint
    and WSDL details come from the binding set's endpoint table, falling
    back to the registry when given.
    """
    if bindings.process_id != process.graph.process_id:
        raise ContractError(
            f"bindings target process {bindings.process_id!r}, "
            f"got {process.graph.process_id!r}"
        )
    source = process.graph.source_xml or render_graph(process)
    root = ET.fromstring(source)
    proc = _find_process(root)

    def endpoint_of(service_key: str) -> tuple:
        ref = bindings.endpoints.get(service_key)
        if ref is not None:
            return ref.address, ref.wsdl_location
        if registry is not None and service_key in registry.services:
            entry = registry.services[service_key]
            return entry.description.endpoint_address, entry.record.wsdl_location
        return "", ""

    manifest = []
    unresolved = set(bindings.unresolved)
    for el in proc:
        if _local(el.tag) != "serviceTask":
            continue
        task_id = el.get("id", "")
        binding = bindings.bindings.get(task_id)
        if binding is None and task_id not in unresolved:
            continue
        ext = el.find(_q("extensionElements"))
        if ext is None:
            ext = ET.Element(_q("extensionElements"))
            docs = [c for c in el if _local(c.tag) == "documentation"]
            el.insert(len(docs), ext)
        for stale in [c for c in ext if c.tag.startswith(f"{{{BINDING_NS}}}")]:
            ext.remove(stale)

        if binding is None:
            ET.SubElement(ext, _tw("unresolved"))
            manifest.append((task_id, "unresolved"))
        elif binding.kind == "atomic":
            cand = binding.candidate
            address, wsdl = endpoint_of(cand.service_key)
            ET.SubElement(ext, _tw("binding"), {
                "serviceKey": cand.service_key,
                "operation": cand.operation_name,
                "endpoint": address,
                "wsdl": wsdl,
            })
            manifest.append((task_id, f"{cand.service_key}.{cand.operation_name} @ {address}"))
        else:
            block = ET.SubElement(ext, _tw("compositeBinding"))
            for order, (service_key, operation) in enumerate(binding.plan.steps, start=1):
                address, wsdl = endpoint_of(service_key)
                ET.SubElement(block, _tw("step"), {
                    "order": str(order),
                    "serviceKey": service_key,
                    "operation": operation,
                    "endpoint": address,
                    "wsdl": wsdl,
                })
            chain = " -> ".join(f"{s}.{o}" for s, o in binding.plan.steps)
            manifest.append((task_id, f"composite: {chain}"))

    body = ET.tostring(root, encoding="unicode")
    document = '<?xml version="1.0" encoding="UTF-8"?>\n' + body
    return ExecutableProcess(document, tuple(manifest))


@dataclass(frozen=True)
class Finding:
    rule_id: str
    severity: str  # "error" | "warning"
    node_id: str
    message: str

    def to_json(self) -> dict:
        return {
            "ruleId": self.rule_id,
            "severity": self.severity,
            "nodeId": self.node_id,
            "message": self.message,
        }


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple

    def errors(self) -> tuple:
        return tuple(f for f in self.findings if f.severity == "error")

    def ok(self) -> bool:
        return not self.errors()

    def to_json(self) -> dict:
        return {"findings": [f.to_json() for f in self.findings], "ok": self.ok()}


def validate_structure(document: str) -> ValidationReport:
    """Structural rules over a (possibly bound) BPMN document.

    R1 reachability from a start event, R2 flow degree, R3 flow endpoint
    existence, R4 service-task binding presence, R5 gateway arity.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position
        raise ParseError(f"malformed BPMN XML: {exc}", line=line, column=column) from exc
    proc = _find_process(root)
    if proc is None:
        raise ParseError("document contains no process element")

    nodes: dict = {}
    elements: dict = {}
    flows = []
    for el in proc:
        tag = _local(el.tag)
        node_id = el.get("id", "")
        if tag == "sequenceFlow":
            flows.append((node_id or f"flow-{len(flows) + 1}", el.get("sourceRef", ""), el.get("targetRef", "")))
        elif node_id and (tag in _DIRECT_KINDS or tag in _DEGRADED_TASK_TAGS):
            nodes[node_id] = _DIRECT_KINDS.get(tag, NodeKind.GENERIC_TASK)
            elements[node_id] = el

    findings = []
    valid_flows = []
    for flow_id, source, target in flows:
        missing = [ref for ref in (source, target) if ref not in nodes]
        if missing:
            findings.append(Finding(
                "R3", "error", flow_id,
                f"flow references unknown node(s): {', '.join(missing)}",
            ))
        else:
            valid_flows.append((flow_id, source, target))

    outgoing: dict = {n: 0 for n in nodes}
    incoming: dict = {n: 0 for n in nodes}
    successors: dict = {n: [] for n in nodes}
    for _, source, target in valid_flows:
        outgoing[source] += 1
        incoming[target] += 1
        successors[source].append(target)

    starts = sorted(n for n, k in nodes.items() if k is NodeKind.START_EVENT)
    reachable = set(starts)
    frontier = list(starts)
    while frontier:
        for nxt in successors[frontier.pop()]:
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)
    for node_id in sorted(nodes):
        if node_id not in reachable:
            findings.append(Finding("R1", "error", node_id, "node unreachable from any start event"))

    for node_id in sorted(nodes):
        kind = nodes[node_id]
        if kind is not NodeKind.END_EVENT and outgoing[node_id] == 0:
            findings.append(Finding("R2", "error", node_id, "non-end node has no outgoing flow"))
        if kind is not NodeKind.START_EVENT and incoming[node_id] == 0:
            findings.append(Finding("R2", "error", node_id, "non-start node has no incoming flow"))

    for node_id in sorted(nodes):
        if nodes[node_id] is not NodeKind.SERVICE_TASK:
            continue
        el = elements[node_id]
        ext = el.find(_q("extensionElements"))
        bound = ext is not None and (
            ext.find(_tw("binding")) is not None or ext.find(_tw("compositeBinding")) is not None
        )
        unresolved = ext is not None and ext.find(_tw("unresolved")) is not None
        if unresolved:
            findings.append(Finding("R4", "error", node_id, "service task marked unresolved"))
        elif not bound:
            findings.append(Finding("R4", "error", node_id, "service task has no binding"))

    for node_id in sorted(nodes):
        if nodes[node_id] in (NodeKind.EXCLUSIVE_GATEWAY, NodeKind.PARALLEL_GATEWAY):
            if outgoing[node_id] < 2 and incoming[node_id] < 2:
                findings.append(Finding(
                    "R5", "warning", node_id, "gateway neither splits nor joins",
                ))

    findings.sort(key=lambda f: (f.rule_id, f.node_id, f.message))
    return ValidationReport(tuple(findings))


# --- Turtle rendering -------------------------------------------------------

_LOCAL_OK = re.compile(r"[^A-Za-z0-9-]+")


class _LocalNames:
    """Deterministic, collision-free local names derived from raw keys."""

    def __init__(self):
        self._by_key: dict = {}
        self._taken: set = set()

    def get(self, prefix: str, key: str) -> str:
        full = (prefix, key)
        if full in self._by_key:
            return self._by_key[full]
        base = _LOCAL_OK.sub("-", key).strip("-") or "x"
        if not base[0].isalnum():
            base = "x" + base
        candidate = f"{prefix}-{base}"
        n = 1
        while candidate in self._taken:
            n += 1
            candidate = f"{prefix}-{base}-{n}"
        self._taken.add(candidate)
        self._by_key[full] = candidate
        return candidate


def _escape_literal(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
    return f'"{out}"'


def _number(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


class _TurtleDoc:
    def __init__(self, prefixes: dict):
        self.prefixes = prefixes
        self.triples: dict = {}

    def add(self, subject: str, predicate: str, obj: str) -> None:
        self.triples.setdefault(subject, []).append((predicate, obj))

    def render(self) -> str:
        lines = [f"@prefix {p}: <{iri}> ." for p, iri in self.prefixes.items()]
        lines.append("")
        for subject in sorted(self.triples):
            pairs = self.triples[subject]
            body = " ;\n    ".join(f"{p} {o}" for p, o in pairs)
            lines.append(f"{subject} {body} .")
        return "\n".join(lines) + "\n"


_WS_CLASSES = (
    "Category", "BusinessEntity", "Service", "Operation", "Input", "Output",
    "QoSRecord", "Keyword", "SecurityInfo", "Interface",
)
_BP_CLASSES = (
    "Process", "ServiceTask", "InputParam", "OutputParam", "WeightAssignment", "Keyword",
)


def export_wsonto(registry: ServiceRegistry) -> str:
    """Service registry as Turtle; byte-stable for equal registries."""
    doc = _TurtleDoc({"rdfs": "http://www.w3.org/2000/01/rdf-schema#", "ws": WSONTO_NS})
    names = _LocalNames()
    for cls in _WS_CLASSES:
        doc.add(f"ws:{cls}", "a", "rdfs:Class")

    keywords_seen = set()

    def keyword_ref(stem: str) -> str:
        local = names.get("kw", stem)
        if stem not in keywords_seen:
            keywords_seen.add(stem)
            doc.add(f"ws:{local}", "a", "ws:Keyword")
            doc.add(f"ws:{local}", "ws:text", _escape_literal(stem))
        return f"ws:{local}"

    for key in sorted(registry.categories):
        entry = registry.categories[key]
        subject = "ws:" + names.get("category", key)
        doc.add(subject, "a", "ws:Category")
        doc.add(subject, "ws:key", _escape_literal(entry.record.t_model_key))
        doc.add(subject, "ws:name", _escape_literal(entry.record.name))
        doc.add(subject, "ws:description", _escape_literal(entry.record.description))
        for stem in sorted(entry.keywords):
            doc.add(subject, "ws:hasKeyword", keyword_ref(stem))

    for business in sorted(registry.business_entities, key=lambda b: b.business_key):
        subject = "ws:" + names.get("business", business.business_key)
        doc.add(subject, "a", "ws:BusinessEntity")
        doc.add(subject, "ws:key", _escape_literal(business.business_key))
        doc.add(subject, "ws:name", _escape_literal(business.business_name))

    for key in sorted(registry.services):
        entry = registry.services[key]
        record = entry.record
        subject = "ws:" + names.get("service", key)
        doc.add(subject, "a", "ws:Service")
        doc.add(subject, "ws:key", _escape_literal(key))
        doc.add(subject, "ws:name", _escape_literal(record.name))
        doc.add(subject, "ws:description", _escape_literal(record.description))
        doc.add(subject, "ws:wsdlLocation", _escape_literal(record.wsdl_location))
        doc.add(subject, "ws:endpointAddress", _escape_literal(entry.description.endpoint_address))
        doc.add(subject, "ws:belongsToCategory", "ws:" + names.get("category", record.category_key))
        doc.add(subject, "ws:providedBy", "ws:" + names.get("business", record.business_key))

        security = "ws:" + names.get("security", key)
        doc.add(security, "a", "ws:SecurityInfo")
        doc.add(security, "ws:transport", _escape_literal(record.security.transport))
        doc.add(security, "ws:authentication", _escape_literal(record.security.authentication))
        doc.add(subject, "ws:securedBy", security)

        qos = "ws:" + names.get("qos", key)
        doc.add(qos, "a", "ws:QoSRecord")
        doc.add(qos, "ws:sampleCount", _number(entry.qos.sample_count))
        for attr in sorted(entry.qos.values):
            doc.add(qos, f"ws:{attr}", _number(entry.qos.values[attr]))
        doc.add(subject, "ws:hasQoS", qos)

        if entry.description.interface_name:
            interface = "ws:" + names.get("interface", key)
            doc.add(interface, "a", "ws:Interface")
            doc.add(interface, "ws:name", _escape_literal(entry.description.interface_name))
            doc.add(subject, "ws:hasInterface", interface)

        for stem in sorted(entry.keywords):
            doc.add(subject, "ws:hasKeyword", keyword_ref(stem))

        for op in sorted(entry.description.operations, key=lambda o: o.name):
            op_subject = "ws:" + names.get("operation", f"{key}-{op.name}")
            doc.add(op_subject, "a", "ws:Operation")
            doc.add(op_subject, "ws:name", _escape_literal(op.name))
            doc.add(op_subject, "ws:description", _escape_literal(op.description))
            for cls, role, params in (("Input", "hasInput", op.inputs), ("Output", "hasOutput", op.outputs)):
                for param in params:
                    p_subject = "ws:" + names.get(cls.lower(), f"{key}-{op.name}-{param.name}")
                    doc.add(p_subject, "a", f"ws:{cls}")
                    doc.add(p_subject, "ws:name", _escape_literal(param.name))
                    doc.add(p_subject, "ws:datatype", _escape_literal(format_datatype(param.datatype)))
                    doc.add(op_subject, f"ws:{role}", p_subject)
            doc.add(subject, "ws:hasOperation", op_subject)

    return doc.render()


def export_bponto(process: AnnotatedProcess) -> str:
    """Annotated process as Turtle; weights keep full float precision."""
    doc = _TurtleDoc({"rdfs": "http://www.w3.org/2000/01/rdf-schema#", "bp": BPONTO_NS})
    names = _LocalNames()
    for cls in _BP_CLASSES:
        doc.add(f"bp:{cls}", "a", "rdfs:Class")

    graph = process.graph
    proc_subject = "bp:" + names.get("process", graph.process_id)
    doc.add(proc_subject, "a", "bp:Process")
    doc.add(proc_subject, "bp:key", _escape_literal(graph.process_id))

    keywords_seen = set()

    def keyword_ref(stem: str) -> str:
        local = names.get("kw", stem)
        if stem not in keywords_seen:
            keywords_seen.add(stem)
            doc.add(f"bp:{local}", "a", "bp:Keyword")
            doc.add(f"bp:{local}", "bp:text", _escape_literal(stem))
        return f"bp:{local}"

    for task_id in graph.service_task_ids():
        spec = process.specs.get(task_id)
        subject = "bp:" + names.get("task", task_id)
        doc.add(subject, "a", "bp:ServiceTask")
        doc.add(subject, "bp:key", _escape_literal(task_id))
        doc.add(subject, "bp:name", _escape_literal(graph.node_names.get(task_id, "")))
        doc.add(proc_subject, "bp:hasTask", subject)
        if spec is None:
            continue
        doc.add(subject, "bp:objective", _escape_literal(spec.objective))
        for cls, role, params in (
            ("InputParam", "hasInput", spec.inputs),
            ("OutputParam", "hasOutput", spec.outputs),
        ):
            for param in params:
                p_subject = "bp:" + names.get(cls.lower(), f"{task_id}-{param.name}")
                doc.add(p_subject, "a", f"bp:{cls}")
                doc.add(p_subject, "bp:name", _escape_literal(param.name))
                doc.add(p_subject, "bp:datatype", _escape_literal(format_datatype(param.datatype)))
                doc.add(subject, f"bp:{role}", p_subject)
        for attr in sorted(spec.weights or {}):
            w_subject = "bp:" + names.get("weight", f"{task_id}-{attr}")
            doc.add(w_subject, "a", "bp:WeightAssignment")
            doc.add(w_subject, "bp:attribute", _escape_literal(attr))
            doc.add(w_subject, "bp:value", _number(spec.weights[attr]))
            doc.add(subject, "bp:hasWeight", w_subject)
        for stem in sorted(process.task_keywords.get(task_id, frozenset())):
            doc.add(subject, "bp:hasKeyword", keyword_ref(stem))

    return doc.render()
