"""Task-to-service matching: keyword scores, IO signature degrees, QoS
utility ranking, and composition fallback.

A candidate survives when its keywords overlap the task's (threshold tau,
against the service's own keywords or its category's) and its signature is
not Disjoint. Exact/Plugin candidates are bindable; everything weaker only
motivates composition. Ranking maximizes the utility

    F = sum_max w_i * z_i + sum_min w_j * (1 - z_j),   z = (q - mu) / sigma

with population statistics over the task's candidate set.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from enum import IntEnum
from math import sqrt
from typing import Iterable, Mapping

from .annotations import AnnotatedProcess, TaskSpec
from .model import (
    Param,
    QoSRecord,
    QoSSchema,
    datatype_from_json,
    datatype_to_json,
    format_datatype,
)
from .registry import ServiceRegistry
from .textkit import EMPTY_LEXICON, KeywordSet, SynonymLexicon, names_match
from .consistency import compatible_type
from .wsdl import OperationSig

DEFAULT_KEYWORD_THRESHOLD = 0.2
DEFAULT_MAX_DEPTH = 3


class MatchDegree(IntEnum):
    DISJOINT = 0
    INTERSECTION = 1
    SUBSUME = 2
    PLUGIN = 3
    EXACT = 4


_DEGREE_LABELS = {
    MatchDegree.EXACT: "Exact",
    MatchDegree.PLUGIN: "Plugin",
    MatchDegree.SUBSUME: "Subsume",
    MatchDegree.INTERSECTION: "Intersection",
    MatchDegree.DISJOINT: "Disjoint",
}
_DEGREE_BY_LABEL = {v: k for k, v in _DEGREE_LABELS.items()}


def degree_label(degree: MatchDegree) -> str:
    return _DEGREE_LABELS[degree]


def degree_from_label(label: str) -> MatchDegree:
    try:
        return _DEGREE_BY_LABEL[label]
    except KeyError:
        raise ValueError(f"unknown match degree {label!r}") from None


def _max_matching(left: list, right: list, edge) -> int:
    """Maximum bipartite matching size via augmenting paths."""
    match_of_right = [-1] * len(right)
    adjacency = [
        [j for j in range(len(right)) if edge(left[i], right[j])]
        for i in range(len(left))
    ]

    def augment(i: int, seen: list) -> bool:
        for j in adjacency[i]:
            if not seen[j]:
                seen[j] = True
                if match_of_right[j] < 0 or augment(match_of_right[j], seen):
                    match_of_right[j] = i
                    return True
        return False

    size = 0
    for i in range(len(left)):
        if augment(i, [False] * len(right)):
            size += 1
    return size


def _saturates(left: list, right: list, edge) -> bool:
    """True when a matching covers every element of `left`."""
    return _max_matching(left, right, edge) == len(left)


def keyword_score(
    task_keywords: KeywordSet,
    service_keywords: KeywordSet,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
) -> float:
    """Jaccard overlap after merging synonym-linked stems pairwise.

    m matched pairs shrink the union to |A| + |B| - m, so identical sets
    score 1, disjoint sets 0, and a synonym hit counts like an equal stem.
    """
    a = sorted(task_keywords)
    b = sorted(service_keywords)
    if not a and not b:
        return 0.0
    m = _max_matching(a, b, lambda x, y: x == y or lexicon.related(x, y))
    return m / (len(a) + len(b) - m)


def _param_edge(lexicon: SynonymLexicon):
    """Edge predicate: provider param can feed consumer param."""

    def edge(provider: Param, consumer: Param) -> bool:
        return names_match(provider.name, consumer.name, lexicon) and compatible_type(
            provider.datatype, consumer.datatype, lexicon
        )

    return edge


def io_degree(spec: TaskSpec, op: OperationSig, lexicon: SynonymLexicon = EMPTY_LEXICON) -> MatchDegree:
    """Classify the signature relation between a task spec and an operation.

    Values flow spec inputs -> op inputs and op outputs -> spec outputs, so
    the edge direction differs per side. Matching is injective: one provided
    param cannot stand in for two distinct required params.
    """
    edge = _param_edge(lexicon)
    spec_in, op_in = list(spec.inputs), list(op.inputs)
    spec_out, op_out = list(spec.outputs), list(op.outputs)

    inputs_covered = _saturates(op_in, spec_in, lambda i, s: edge(s, i))
    inputs_exact = inputs_covered and len(op_in) == len(spec_in)
    outputs_superset = _saturates(spec_out, op_out, lambda s, o: edge(o, s))
    outputs_subset = _saturates(op_out, spec_out, lambda o, s: edge(o, s))
    outputs_exact = outputs_superset and len(op_out) == len(spec_out)

    if inputs_exact and outputs_exact:
        return MatchDegree.EXACT
    if inputs_covered and outputs_superset:
        return MatchDegree.PLUGIN
    if op_out and outputs_subset and not outputs_superset:
        return MatchDegree.SUBSUME
    if any(edge(o, s) for o in op_out for s in spec_out):
        return MatchDegree.INTERSECTION
    return MatchDegree.DISJOINT


@dataclass(frozen=True)
class MatchCandidate:
    service_key: str
    operation_name: str
    degree: MatchDegree
    keyword_score: float
    qos: QoSRecord = field(default_factory=QoSRecord, compare=False)
    utility: float | None = None

    def to_json(self) -> dict:
        return {
            "serviceKey": self.service_key,
            "operation": self.operation_name,
            "degree": degree_label(self.degree),
            "keywordScore": self.keyword_score,
            "utility": self.utility,
        }


def candidate_set(
    registry: ServiceRegistry,
    spec: TaskSpec,
    task_keywords: KeywordSet,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
    tau: float = DEFAULT_KEYWORD_THRESHOLD,
) -> list:
    """All non-Disjoint operations whose service or category keywords clear
    the threshold. Utility stays unset until ranking."""
    if not 0 <= tau <= 1:
        raise ValueError("tau must lie in [0, 1]")
    candidates = []
    for service_key, op in registry.operations():
        entry = registry.services[service_key]
        score = keyword_score(task_keywords, entry.keywords, lexicon)
        category = registry.categories.get(entry.record.category_key)
        if category is not None:
            score = max(score, keyword_score(task_keywords, category.keywords, lexicon))
        if score < tau:
            continue
        degree = io_degree(spec, op, lexicon)
        if degree is MatchDegree.DISJOINT:
            continue
        candidates.append(MatchCandidate(service_key, op.name, degree, score, entry.qos))
    return candidates


@dataclass(frozen=True)
class AttributeStats:
    mean: float
    stddev: float
    count: int


def compute_stats(records: Iterable[QoSRecord], schema: QoSSchema) -> dict:
    """Population mean/stddev per attribute over the candidate records.

    Attributes with no data get (0, 0, 0); candidates missing a value are
    excluded from that attribute's population, which matches the z = 0
    imputation used during scoring.
    """
    records = list(records)
    stats = {}
    for name in schema.names():
        present = [r.values[name] for r in records if name in r.values]
        if not present:
            stats[name] = AttributeStats(0.0, 0.0, 0)
            continue
        mean = sum(present) / len(present)
        variance = sum((v - mean) ** 2 for v in present) / len(present)
        stats[name] = AttributeStats(mean, sqrt(variance), len(present))
    return stats


def utility_score(
    qos: QoSRecord,
    weights: Mapping[str, float],
    stats: Mapping[str, AttributeStats],
    schema: QoSSchema,
) -> float:
    """Weighted z-score utility; maximize terms add w*z, minimize terms add
    w*(1 - z). Zero-spread and missing values contribute z = 0."""
    total = 0.0
    for name, weight in weights.items():
        st = stats.get(name)
        if st is None or st.stddev == 0 or name not in qos.values:
            z = 0.0
        else:
            z = (qos.values[name] - st.mean) / st.stddev
        if schema.direction(name) == "maximize":
            total += weight * z
        else:
            total += weight * (1.0 - z)
    return total


def rank_candidates(
    candidates: Iterable[MatchCandidate],
    weights: Mapping[str, float],
    schema: QoSSchema,
    stats: Mapping[str, AttributeStats] | None = None,
) -> list:
    """Sort candidates by descending utility; stats default to the candidate
    set itself. Ties fall back to degree, keyword score, then keys."""
    candidates = list(candidates)
    if stats is None:
        stats = compute_stats((c.qos for c in candidates), schema)
    scored = [
        replace(c, utility=utility_score(c.qos, weights, stats, schema))
        for c in candidates
    ]
    scored.sort(key=lambda c: (
        -c.utility, -int(c.degree), -c.keyword_score, c.service_key, c.operation_name,
    ))
    return scored


@dataclass(frozen=True)
class CompositePlan:
    steps: tuple
    produced_params: frozenset

    def to_json(self) -> dict:
        return {
            "steps": [{"serviceKey": s, "operation": o} for s, o in self.steps],
            "producedParams": [
                {"name": p.name, "type": datatype_to_json(p.datatype)}
                for p in sorted(
                    self.produced_params,
                    key=lambda p: (p.name, format_datatype(p.datatype)),
                )
            ],
        }


def _covered(available: Iterable[Param], needed: Param, lexicon: SynonymLexicon) -> bool:
    edge = _param_edge(lexicon)
    return any(edge(p, needed) for p in available)


def compose_chain(
    registry: ServiceRegistry,
    spec: TaskSpec,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> CompositePlan | None:
    """Breadth-first forward chaining toward the spec outputs.

    A state is the set of available params; an operation applies when every
    input is covered (an available value may feed several inputs). Shortest
    plans win and equal-length plans resolve to the lexicographically
    smallest step sequence. Plans need at least one step; a spec already
    satisfied by its own inputs yields none.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    operations = registry.operations()
    goal = list(spec.outputs)

    def satisfied(available: frozenset) -> bool:
        return all(_covered(available, out, lexicon) for out in goal)

    start = frozenset(spec.inputs)
    if satisfied(start):
        return None
    queue = deque([(start, ())])
    visited = {start}
    while queue:
        available, steps = queue.popleft()
        if len(steps) == max_depth:
            continue
        for service_key, op in operations:
            if not all(_covered(available, p, lexicon) for p in op.inputs):
                continue
            nxt = available | frozenset(op.outputs)
            if nxt in visited:
                continue
            nxt_steps = steps + ((service_key, op.name),)
            if satisfied(nxt):
                return CompositePlan(nxt_steps, nxt)
            visited.add(nxt)
            queue.append((nxt, nxt_steps))
    return None


@dataclass(frozen=True)
class TaskBinding:
    kind: str  # "atomic" | "composite"
    candidate: MatchCandidate | None = None
    plan: CompositePlan | None = None

    def service_keys(self) -> tuple:
        if self.kind == "atomic":
            return (self.candidate.service_key,)
        return tuple(s for s, _ in self.plan.steps)

    def to_json(self) -> dict:
        if self.kind == "atomic":
            return {"kind": "atomic", **self.candidate.to_json()}
        return {"kind": "composite", **self.plan.to_json()}


@dataclass(frozen=True)
class EndpointRef:
    address: str
    wsdl_location: str


@dataclass(frozen=True)
class BindingSet:
    process_id: str
    bindings: dict
    unresolved: tuple
    endpoints: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "processId": self.process_id,
            "bindings": {t: b.to_json() for t, b in sorted(self.bindings.items())},
            "unresolved": list(self.unresolved),
            "endpoints": {
                k: {"address": e.address, "wsdl": e.wsdl_location}
                for k, e in sorted(self.endpoints.items())
            },
        }


def binding_set_to_json(bindings: BindingSet) -> str:
    return json.dumps(bindings.to_json(), indent=2, sort_keys=True)


def _candidate_from_json(obj: dict) -> MatchCandidate:
    return MatchCandidate(
        service_key=obj["serviceKey"],
        operation_name=obj["operation"],
        degree=degree_from_label(obj["degree"]),
        keyword_score=obj["keywordScore"],
        utility=obj["utility"],
    )


def _plan_from_json(obj: dict) -> CompositePlan:
    steps = tuple((s["serviceKey"], s["operation"]) for s in obj["steps"])
    produced = frozenset(
        Param(p["name"], datatype_from_json(p["type"])) for p in obj["producedParams"]
    )
    return CompositePlan(steps, produced)


def binding_set_from_json(document: str) -> BindingSet:
    doc = json.loads(document)
    bindings = {}
    for task_id, obj in doc["bindings"].items():
        if obj["kind"] == "atomic":
            bindings[task_id] = TaskBinding("atomic", candidate=_candidate_from_json(obj))
        else:
            bindings[task_id] = TaskBinding("composite", plan=_plan_from_json(obj))
    endpoints = {
        k: EndpointRef(e["address"], e["wsdl"]) for k, e in doc.get("endpoints", {}).items()
    }
    return BindingSet(doc["processId"], bindings, tuple(doc["unresolved"]), endpoints)


@dataclass(frozen=True)
class TaskMatch:
    task_id: str
    ranked: tuple
    stats: dict
    binding: TaskBinding | None


def _category_population(registry: ServiceRegistry, candidates: list) -> list:
    """QoS records of every service sharing a category with some candidate."""
    categories = {
        registry.services[c.service_key].record.category_key for c in candidates
    }
    return [
        entry.qos
        for key, entry in sorted(registry.services.items())
        if entry.record.category_key in categories
    ]


def match_task(
    registry: ServiceRegistry,
    spec: TaskSpec,
    task_keywords: KeywordSet,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
    tau: float = DEFAULT_KEYWORD_THRESHOLD,
    max_depth: int = DEFAULT_MAX_DEPTH,
    category_stats: bool = False,
) -> TaskMatch:
    """Rank a task's candidates and decide its binding.

    The statistics population is the candidate set itself, or with
    category_stats every service in the candidates' categories.
    """
    candidates = candidate_set(registry, spec, task_keywords, lexicon, tau)
    if category_stats:
        stats = compute_stats(_category_population(registry, candidates), registry.schema)
    else:
        stats = compute_stats((c.qos for c in candidates), registry.schema)
    ranked = rank_candidates(candidates, spec.weights or {}, registry.schema, stats)

    binding = None
    bindable = [c for c in ranked if c.degree >= MatchDegree.PLUGIN]
    if bindable:
        binding = TaskBinding("atomic", candidate=bindable[0])
    else:
        plan = compose_chain(registry, spec, lexicon, max_depth)
        if plan is not None and plan.steps:
            binding = TaskBinding("composite", plan=plan)
    return TaskMatch(spec.task_id, tuple(ranked), stats, binding)


def bind_process_tasks(
    registry: ServiceRegistry,
    process: AnnotatedProcess,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
    tau: float = DEFAULT_KEYWORD_THRESHOLD,
    max_depth: int = DEFAULT_MAX_DEPTH,
    category_stats: bool = False,
) -> tuple:
    """Match every service task; returns (BindingSet, list of TaskMatch)."""
    matches = []
    bindings = {}
    unresolved = []
    used_services = set()
    for task_id in process.graph.service_task_ids():
        match = match_task(
            registry,
            process.specs[task_id],
            process.task_keywords.get(task_id, frozenset()),
            lexicon,
            tau,
            max_depth,
            category_stats,
        )
        matches.append(match)
        if match.binding is None:
            unresolved.append(task_id)
        else:
            bindings[task_id] = match.binding
            used_services.update(match.binding.service_keys())

    endpoints = {}
    for key in sorted(used_services):
        entry = registry.services[key]
        endpoints[key] = EndpointRef(entry.description.endpoint_address, entry.record.wsdl_location)
    binding_set = BindingSet(
        process.graph.process_id, bindings, tuple(unresolved), endpoints
    )
    return binding_set, matches
