"""Project persistence and the operations the HTTP API exposes.

A project is a directory of uploaded originals plus derived JSON snapshots;
no database. Writes go to a temp file and rename into place, serialized by
a per-project lock, so concurrent readers never see torn artifacts.
"""
from __future__ import annotations

import json
import os
import re
from pathlib import Path

from filelock import FileLock

from .annotations import (
    AnnotatedProcess,
    TaskSpec,
    apply_annotations,
    parse_task_specs,
    spec_to_json,
    specs_to_json,
    validate_annotations,
)
from .bpmn import NodeKind, graph_to_json, parse_bpmn
from .consistency import check_flows
from .emitter import emit_executable, export_bponto, export_wsonto, validate_structure
from .errors import (
    BadTargetError,
    ConflictError,
    DuplicateKeyError,
    InvalidSlugError,
    NotFoundError,
    ParseError,
    SpecValidationError,
)
from .matcher import (
    DEFAULT_KEYWORD_THRESHOLD,
    DEFAULT_MAX_DEPTH,
    BindingSet,
    bind_process_tasks,
    binding_set_from_json,
    binding_set_to_json,
)
from .model import DEFAULT_QOS_SCHEMA
from .registry import (
    ServiceRegistry,
    aggregate_qos,
    build_registry,
    parse_log_lines,
    parse_manifest,
    registry_to_json,
)
from .textkit import EMPTY_LEXICON, load_lexicon
from .wsdl import parse_wsdl

SLUG_RE = re.compile(r"^[a-z0-9-]{1,64}$")
ARTIFACT_KINDS = ("manifest", "wsdl", "logs", "lexicon", "bpmn", "specs")
EXPORT_KINDS = ("executableBpmn", "wsonto", "bponto", "validation")

_ARTIFACT_FILES = {
    "manifest": "manifest.json",
    "logs": "logs.jsonl",
    "lexicon": "lexicon.txt",
    "bpmn": "process.bpmn",
    "specs": "specs.json",
}

_EXPORT_MEDIA = {
    "executableBpmn": "application/xml",
    "wsonto": "text/turtle",
    "bponto": "text/turtle",
    "validation": "application/json",
}


def _atomic_write(path: Path, payload: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)


def _decode(payload: bytes, kind: str) -> str:
    try:
        return payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{kind} artifact is not valid UTF-8") from exc


class ProjectStore:
    """Filesystem-backed project registry rooted at one directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    # -- layout helpers ------------------------------------------------------

    def _dir(self, project_id: str, must_exist: bool = True) -> Path:
        if not SLUG_RE.match(project_id):
            raise InvalidSlugError(project_id)
        path = self.root / project_id
        if must_exist and not (path / "project.json").exists():
            raise NotFoundError(f"project {project_id!r} does not exist")
        return path

    def _lock(self, path: Path) -> FileLock:
        return FileLock(str(path / "project.lock"))

    # -- lifecycle -----------------------------------------------------------

    def create_or_load(self, project_id: str) -> dict:
        path = self._dir(project_id, must_exist=False)
        created = not (path / "project.json").exists()
        path.mkdir(parents=True, exist_ok=True)
        (path / "wsdl").mkdir(exist_ok=True)
        (path / "derived").mkdir(exist_ok=True)
        if created:
            _atomic_write(path / "project.json", json.dumps({"projectId": project_id}).encode())
        return {"projectId": project_id, "created": created, "artifacts": self._artifact_status(path)}

    def _artifact_status(self, path: Path) -> dict:
        return {
            "manifest": (path / "manifest.json").exists(),
            "wsdlCount": len(list((path / "wsdl").glob("*"))) if (path / "wsdl").exists() else 0,
            "logs": (path / "logs.jsonl").exists(),
            "lexicon": (path / "lexicon.txt").exists(),
            "bpmn": (path / "process.bpmn").exists(),
            "specs": (path / "specs.json").exists(),
            "bindings": (path / "derived" / "bindings.json").exists(),
        }

    # -- artifact intake -----------------------------------------------------

    def submit_artifact(
        self,
        project_id: str,
        kind: str,
        payload: bytes,
        filename: str | None = None,
    ) -> dict:
        """Validate through the owning parser, then store atomically.

        A payload that fails to parse leaves the previous artifact in place.
        """
        if kind not in ARTIFACT_KINDS:
            raise NotFoundError(f"unknown artifact kind {kind!r}")
        path = self._dir(project_id)
        warnings: list = []
        text = _decode(payload, kind)

        if kind == "wsdl":
            if not filename or "/" in filename or "\\" in filename or ".." in filename:
                raise ParseError("wsdl uploads need a plain filename query parameter")
            parse_wsdl(text, warnings)
            target = path / "wsdl" / filename
            stored = f"wsdl/{filename}"
        else:
            if kind == "manifest":
                parse_manifest(text)
            elif kind == "logs":
                parse_log_lines(text, warnings)
            elif kind == "lexicon":
                load_lexicon(text)
            elif kind == "bpmn":
                parse_bpmn(text, warnings)
            else:
                self._validate_specs_payload(path, text, warnings)
            target = path / _ARTIFACT_FILES[kind]
            stored = _ARTIFACT_FILES[kind]

        with self._lock(path):
            target.parent.mkdir(exist_ok=True)
            _atomic_write(target, payload)
        return {"projectId": project_id, "kind": kind, "stored": stored, "warnings": warnings}

    def _validate_specs_payload(self, path: Path, text: str, warnings: list) -> None:
        _, specs = parse_task_specs(text)
        seen = set()
        for spec in specs:
            if spec.task_id in seen:
                raise DuplicateKeyError(spec.task_id, context="task specs")
            seen.add(spec.task_id)
        errors = validate_annotations(specs, DEFAULT_QOS_SCHEMA, infos=warnings)
        if errors:
            raise SpecValidationError(errors)
        bpmn_path = path / "process.bpmn"
        if bpmn_path.exists():
            graph = parse_bpmn(bpmn_path.read_text("utf-8"))
            for spec in specs:
                if graph.nodes.get(spec.task_id) is not NodeKind.SERVICE_TASK:
                    raise BadTargetError(spec.task_id)

    # -- derived loads -------------------------------------------------------

    def load_registry(self, project_id: str) -> ServiceRegistry:
        path = self._dir(project_id)
        manifest_path = path / "manifest.json"
        if not manifest_path.exists():
            raise ConflictError("manifest")
        manifest = parse_manifest(manifest_path.read_text("utf-8"))
        wsdls = {}
        for record in manifest.services:
            wsdl_path = path / "wsdl" / record.wsdl_location
            if wsdl_path.exists():
                wsdls[record.service_key] = parse_wsdl(wsdl_path.read_text("utf-8"))
        logs_path = path / "logs.jsonl"
        qos = {}
        if logs_path.exists():
            lines = parse_log_lines(logs_path.read_text("utf-8"))
            qos = aggregate_qos(lines, DEFAULT_QOS_SCHEMA)
        return build_registry(manifest, wsdls, qos, DEFAULT_QOS_SCHEMA)

    def load_lexicon(self, project_id: str):
        path = self._dir(project_id) / "lexicon.txt"
        if not path.exists():
            return EMPTY_LEXICON
        return load_lexicon(path.read_text("utf-8"))

    def load_graph(self, project_id: str):
        path = self._dir(project_id) / "process.bpmn"
        if not path.exists():
            raise ConflictError("bpmn")
        return parse_bpmn(path.read_text("utf-8"))

    def load_specs(self, project_id: str) -> list:
        path = self._dir(project_id) / "specs.json"
        if not path.exists():
            return []
        _, specs = parse_task_specs(path.read_text("utf-8"))
        return specs

    def load_process(self, project_id: str) -> AnnotatedProcess:
        graph = self.load_graph(project_id)
        specs = self.load_specs(project_id)
        if graph.service_task_ids() and not specs:
            raise ConflictError("specs")
        return apply_annotations(graph, specs, schema=DEFAULT_QOS_SCHEMA)

    # -- task spec editing ----------------------------------------------------

    def update_task_spec(self, project_id: str, task_id: str, spec: TaskSpec) -> list:
        """Returns validation errors; persists only when there are none."""
        path = self._dir(project_id)
        graph = self.load_graph(project_id)
        if graph.nodes.get(task_id) is not NodeKind.SERVICE_TASK:
            raise NotFoundError(f"no service task {task_id!r} in the process")
        errors = validate_annotations([spec], DEFAULT_QOS_SCHEMA)
        if errors:
            return errors
        with self._lock(path):
            existing = {s.task_id: s for s in self.load_specs(project_id)}
            existing[task_id] = spec
            payload = specs_to_json(graph.process_id, list(existing.values()))
            _atomic_write(path / "specs.json", payload.encode())
        return []

    # -- matching --------------------------------------------------------------

    def run_match(
        self,
        project_id: str,
        tau: float = DEFAULT_KEYWORD_THRESHOLD,
        max_depth: int = DEFAULT_MAX_DEPTH,
        include_consistency: bool = True,
        category_stats: bool = False,
    ) -> str:
        """Match every task and persist the outcome; returns the response
        body, byte-identical for identical state and options."""
        path = self._dir(project_id)
        registry = self.load_registry(project_id)
        process = self.load_process(project_id)
        lexicon = self.load_lexicon(project_id)

        binding_set, matches = bind_process_tasks(
            registry, process, lexicon, tau, max_depth, category_stats
        )
        response: dict = {
            "projectId": project_id,
            "processId": process.graph.process_id,
            "options": {
                "tau": tau,
                "maxDepth": max_depth,
                "includeConsistency": include_consistency,
                "categoryStats": category_stats,
            },
            "tasks": [
                {
                    "taskId": m.task_id,
                    "name": process.graph.node_names.get(m.task_id, ""),
                    "keywords": sorted(process.task_keywords.get(m.task_id, frozenset())),
                    "stats": {
                        name: {"mean": st.mean, "stddev": st.stddev, "count": st.count}
                        for name, st in m.stats.items()
                    },
                    "candidates": [c.to_json() for c in m.ranked],
                    "binding": m.binding.to_json() if m.binding else None,
                }
                for m in matches
            ],
            "unresolved": list(binding_set.unresolved),
        }
        if include_consistency:
            response["consistency"] = [r.to_json() for r in check_flows(process, lexicon)]

        body = json.dumps(response, indent=2, sort_keys=True)
        with self._lock(path):
            _atomic_write(path / "derived" / "registry.json", registry_to_json(registry).encode())
            _atomic_write(path / "derived" / "bindings.json", binding_set_to_json(binding_set).encode())
            _atomic_write(path / "derived" / "match_response.json", body.encode())
        return body

    def load_bindings(self, project_id: str) -> BindingSet:
        path = self._dir(project_id) / "derived" / "bindings.json"
        if not path.exists():
            raise ConflictError("bindings")
        return binding_set_from_json(path.read_text("utf-8"))

    def get_bindings_json(self, project_id: str) -> str:
        path = self._dir(project_id) / "derived" / "bindings.json"
        if not path.exists():
            raise ConflictError("bindings")
        return path.read_text("utf-8")

    # -- exports ---------------------------------------------------------------

    def export(self, project_id: str, what: str) -> tuple:
        """Returns (payload bytes, media type)."""
        if what not in EXPORT_KINDS:
            raise NotFoundError(f"unknown export {what!r}")
        if what == "wsonto":
            return export_wsonto(self.load_registry(project_id)).encode(), _EXPORT_MEDIA[what]
        if what == "bponto":
            return export_bponto(self.load_process(project_id)).encode(), _EXPORT_MEDIA[what]
        process = self.load_process(project_id)
        bindings = self.load_bindings(project_id)
        executable = emit_executable(process, bindings)
        if what == "executableBpmn":
            return executable.document.encode(), _EXPORT_MEDIA[what]
        report = validate_structure(executable.document)
        body = json.dumps(report.to_json(), indent=2, sort_keys=True)
        return body.encode(), _EXPORT_MEDIA[what]

    # -- UI view ----------------------------------------------------------------

    def process_view(self, project_id: str) -> dict:
        """Graph, specs, consistency and binding summary for the UI."""
        path = self._dir(project_id)
        graph = self.load_graph(project_id)
        specs = self.load_specs(project_id)
        known = {s.task_id: s for s in specs}
        lexicon = self.load_lexicon(project_id)

        specs_complete = all(t in known for t in graph.service_task_ids())
        consistency = []
        if specs_complete and graph.service_task_ids():
            process = apply_annotations(graph, list(known.values()), schema=DEFAULT_QOS_SCHEMA)
            consistency = [r.to_json() for r in check_flows(process, lexicon)]

        bindings_path = path / "derived" / "bindings.json"
        bindings = json.loads(bindings_path.read_text("utf-8")) if bindings_path.exists() else None

        return {
            "projectId": project_id,
            "graph": graph_to_json(graph),
            "specs": {t: spec_to_json(s) for t, s in sorted(known.items())},
            "specsComplete": specs_complete,
            "consistency": consistency,
            "bindings": bindings,
            "artifacts": self._artifact_status(path),
        }
