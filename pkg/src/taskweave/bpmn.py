"""BPMN 2.0 parsing into a small process graph.

Only the flow objects the binding pipeline acts on are modeled: start/end
events, service tasks, generic tasks, and exclusive/parallel gateways.
Everything else is skipped with a warning so documents from full-featured
editors still load.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum

from .errors import DanglingReferenceError, DuplicateKeyError, ParseError

BPMN_NS = "http://www.omg.org/spec/BPMN/20100524/MODEL"


class NodeKind(str, Enum):
    START_EVENT = "startEvent"
    END_EVENT = "endEvent"
    SERVICE_TASK = "serviceTask"
    GENERIC_TASK = "genericTask"
    EXCLUSIVE_GATEWAY = "exclusiveGateway"
    PARALLEL_GATEWAY = "parallelGateway"


@dataclass(frozen=True)
class Edge:
    flow_id: str
    source_ref: str
    target_ref: str


# Flow-node tags modeled one-to-one.
_DIRECT_KINDS = {
    "startEvent": NodeKind.START_EVENT,
    "endEvent": NodeKind.END_EVENT,
    "serviceTask": NodeKind.SERVICE_TASK,
    "task": NodeKind.GENERIC_TASK,
    "exclusiveGateway": NodeKind.EXCLUSIVE_GATEWAY,
    "parallelGateway": NodeKind.PARALLEL_GATEWAY,
}

# Task variants degraded to generic tasks so the flow stays connected.
_DEGRADED_TASK_TAGS = {
    "userTask",
    "manualTask",
    "scriptTask",
    "sendTask",
    "receiveTask",
    "businessRuleTask",
}

# Non-flow metadata silently ignored.
_IGNORED_TAGS = {
    "documentation",
    "extensionElements",
    "laneSet",
    "ioSpecification",
    "property",
    "dataObject",
    "dataObjectReference",
    "dataStoreReference",
    "textAnnotation",
    "association",
    "group",
    "incoming",
    "outgoing",
}


@dataclass(frozen=True)
class ProcessGraph:
    process_id: str
    nodes: dict
    edges: tuple
    node_names: dict
    source_xml: str = field(default="", compare=False)

    def service_task_ids(self) -> list:
        return sorted(n for n, k in self.nodes.items() if k is NodeKind.SERVICE_TASK)

    def start_event_ids(self) -> list:
        return sorted(n for n, k in self.nodes.items() if k is NodeKind.START_EVENT)

    def successors(self, node_id: str) -> list:
        return sorted(e.target_ref for e in self.edges if e.source_ref == node_id)

    def predecessors(self, node_id: str) -> list:
        return sorted(e.source_ref for e in self.edges if e.target_ref == node_id)

    def ancestors(self, node_id: str) -> set:
        """All nodes with a directed path to node_id (excluding itself)."""
        seen = set()
        frontier = [node_id]
        while frontier:
            current = frontier.pop()
            for prev in self.predecessors(current):
                if prev not in seen:
                    seen.add(prev)
                    frontier.append(prev)
        seen.discard(node_id)
        return seen


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_bpmn(document: str, warnings: list | None = None) -> ProcessGraph:
    """Parse the first process element of a BPMN 2.0 document.

    Task variants (userTask etc.) degrade to generic tasks; unsupported flow
    objects are skipped, along with any sequence flow touching them. A
    sequence flow referencing an id that appears nowhere in the process is a
    dangling reference and raises.
    """
    sink = warnings if warnings is not None else []
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position
        raise ParseError(f"malformed BPMN XML: {exc}", line=line, column=column) from exc

    if _local(root.tag) == "process":
        process = root
    else:
        process = next(root.iter(f"{{{BPMN_NS}}}process"), None)
        if process is None:
            # Tolerate documents with a default (missing) namespace.
            process = next((el for el in root.iter() if _local(el.tag) == "process"), None)
    if process is None:
        raise ParseError("document contains no process element")

    nodes: dict = {}
    node_names: dict = {}
    skipped_ids: set = set()
    flows = []

    def add_node(node_id: str, kind: NodeKind, name: str):
        if node_id in nodes:
            raise DuplicateKeyError(node_id, context="process nodes")
        nodes[node_id] = kind
        node_names[node_id] = name

    synthetic = 0
    for el in list(process):
        tag = _local(el.tag)
        if tag in _IGNORED_TAGS:
            continue
        node_id = el.get("id", "")
        name = el.get("name", "")
        if tag == "sequenceFlow":
            flow_id = node_id
            if not flow_id:
                synthetic += 1
                flow_id = f"flow-{synthetic}"
            flows.append((flow_id, el.get("sourceRef", ""), el.get("targetRef", "")))
            continue
        if not node_id:
            sink.append(f"element {tag!r} without id skipped")
            continue
        if tag in _DIRECT_KINDS:
            add_node(node_id, _DIRECT_KINDS[tag], name)
        elif tag in _DEGRADED_TASK_TAGS:
            sink.append(f"{tag} {node_id!r} treated as a generic task")
            add_node(node_id, NodeKind.GENERIC_TASK, name)
        else:
            sink.append(f"unsupported element {tag} {node_id!r} skipped")
            skipped_ids.add(node_id)

    edges = []
    for flow_id, source, target in flows:
        if source in skipped_ids or target in skipped_ids:
            sink.append(f"sequence flow {flow_id!r} touches a skipped element; dropped")
            continue
        if source not in nodes or target not in nodes:
            missing = source if source not in nodes else target
            raise DanglingReferenceError(missing, context=f"sequence flow {flow_id!r}")
        edges.append(Edge(flow_id, source, target))

    if not any(k is NodeKind.START_EVENT for k in nodes.values()):
        sink.append("process has no start event")
    if not any(k is NodeKind.END_EVENT for k in nodes.values()):
        sink.append("process has no end event")

    return ProcessGraph(
        process_id=process.get("id", "process"),
        nodes=nodes,
        edges=tuple(edges),
        node_names=node_names,
        source_xml=document,
    )


def graph_to_json(graph: ProcessGraph) -> dict:
    return {
        "processId": graph.process_id,
        "nodes": [
            {"id": n, "kind": graph.nodes[n].value, "name": graph.node_names.get(n, "")}
            for n in sorted(graph.nodes)
        ],
        "edges": [
            {"flowId": e.flow_id, "sourceRef": e.source_ref, "targetRef": e.target_ref}
            for e in graph.edges
        ],
    }
