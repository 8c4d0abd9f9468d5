"""Task specifications: the sidecar JSON, weight validation, and attachment
of specs to a process graph."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .bpmn import NodeKind, ProcessGraph
from .errors import BadTargetError, DuplicateKeyError, MissingSpecError, ParseError
from .model import (
    Param,
    QoSSchema,
    DEFAULT_QOS_SCHEMA,
    datatype_from_json,
    datatype_to_json,
)
from .textkit import DEFAULT_STOP_WORDS, extract_keywords

WEIGHT_SUM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class TaskSpec:
    """What a designer wants a service task to do.

    weights of None means the designer left QoS priorities unstated; they
    default to uniform when the spec is attached to a process.
    """

    task_id: str
    objective: str = ""
    inputs: tuple = ()
    outputs: tuple = ()
    weights: dict | None = None


@dataclass(frozen=True)
class SpecError:
    task_id: str
    message: str


def parse_task_specs(document: str) -> tuple:
    """Parse the annotation sidecar; returns (processId or None, specs)."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed spec JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict) or not isinstance(data.get("tasks", []), list):
        raise ParseError("spec sidecar must be an object with a tasks list")

    specs = []
    for entry in data.get("tasks", []):
        if "taskId" not in entry:
            raise ParseError("task spec missing taskId")
        weights = entry.get("weights")
        if weights is not None:
            if not isinstance(weights, dict):
                raise ParseError(f"weights of task {entry['taskId']!r} must be an object")
            weights = {str(k): float(v) for k, v in weights.items()}
        specs.append(TaskSpec(
            task_id=str(entry["taskId"]),
            objective=str(entry.get("objective", "")),
            inputs=tuple(_param_from_json(p) for p in entry.get("inputs", [])),
            outputs=tuple(_param_from_json(p) for p in entry.get("outputs", [])),
            weights=weights,
        ))
    return data.get("processId"), specs


def _param_from_json(obj: dict) -> Param:
    if "name" not in obj or "type" not in obj:
        raise ParseError("param entries need name and type")
    return Param(str(obj["name"]), datatype_from_json(obj["type"]))


def _param_to_json(param: Param) -> dict:
    return {"name": param.name, "type": datatype_to_json(param.datatype)}


def spec_to_json(spec: TaskSpec) -> dict:
    doc = {
        "taskId": spec.task_id,
        "objective": spec.objective,
        "inputs": [_param_to_json(p) for p in spec.inputs],
        "outputs": [_param_to_json(p) for p in spec.outputs],
    }
    if spec.weights is not None:
        doc["weights"] = {k: spec.weights[k] for k in sorted(spec.weights)}
    return doc


def specs_to_json(process_id: str, specs) -> str:
    doc = {
        "processId": process_id,
        "tasks": [spec_to_json(s) for s in sorted(specs, key=lambda s: s.task_id)],
    }
    return json.dumps(doc, indent=2)


def uniform_weights(schema: QoSSchema) -> dict:
    names = schema.names()
    return {name: 1.0 / len(names) for name in names}


def validate_annotations(
    specs,
    schema: QoSSchema = DEFAULT_QOS_SCHEMA,
    infos: list | None = None,
) -> list:
    """Check every spec's weights against the schema.

    Returns the error list; an absent weights map is not an error (uniform
    weights apply) and is only noted through the infos sink.
    """
    sink = infos if infos is not None else []
    known = set(schema.names())
    errors = []
    for spec in specs:
        if spec.weights is None:
            sink.append(f"task {spec.task_id!r}: no weights given, defaulting to uniform")
            continue
        unknown = sorted(set(spec.weights) - known)
        if unknown:
            errors.append(SpecError(spec.task_id, f"unknown attribute(s) {', '.join(unknown)}"))
            continue
        bad = sorted(name for name, w in spec.weights.items() if not 0 < w <= 1)
        if bad:
            errors.append(SpecError(spec.task_id, f"weight(s) out of (0,1]: {', '.join(bad)}"))
            continue
        total = sum(spec.weights.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            errors.append(SpecError(spec.task_id, f"weights sum {total:.6g}, expected 1"))
    return errors


@dataclass(frozen=True)
class AnnotatedProcess:
    graph: ProcessGraph
    specs: dict = field(default_factory=dict)
    task_keywords: dict = field(default_factory=dict)


def apply_annotations(
    graph: ProcessGraph,
    specs,
    stop_words: frozenset = DEFAULT_STOP_WORDS,
    schema: QoSSchema = DEFAULT_QOS_SCHEMA,
) -> AnnotatedProcess:
    """Attach specs to the graph's service tasks and derive task keywords.

    Every service task must be covered by exactly one spec; specs aimed at
    unknown or non-service nodes are rejected.
    """
    by_task: dict = {}
    for spec in specs:
        if spec.task_id in by_task:
            raise DuplicateKeyError(spec.task_id, context="task specs")
        if graph.nodes.get(spec.task_id) is not NodeKind.SERVICE_TASK:
            raise BadTargetError(spec.task_id)
        if spec.weights is None:
            spec = replace(spec, weights=uniform_weights(schema))
        by_task[spec.task_id] = spec

    for task_id in graph.service_task_ids():
        if task_id not in by_task:
            raise MissingSpecError(task_id)

    keywords = {
        task_id: extract_keywords(spec.objective, stop_words)
        for task_id, spec in by_task.items()
    }
    return AnnotatedProcess(graph, by_task, keywords)
