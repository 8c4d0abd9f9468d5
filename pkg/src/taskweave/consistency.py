"""Datatype consistency checking across connected service tasks.

An output may feed an input when its simple kind widens into the input's
kind: integer -> long -> float -> double, date -> dateTime, and identity.
String never converts either way; silent coercion would hide real errors.
"""
from __future__ import annotations

from dataclasses import dataclass

from .annotations import AnnotatedProcess
from .model import SIMPLE_KINDS, ComplexType, DataType, SimpleType, format_datatype
from .textkit import EMPTY_LEXICON, SynonymLexicon, names_match


def _closure() -> frozenset:
    chain = [("integer", "long"), ("long", "float"), ("float", "double"), ("date", "dateTime")]
    pairs = {(k, k) for k in SIMPLE_KINDS}
    pairs.update(chain)
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            for c, d in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return frozenset(pairs)


WIDENING = _closure()


def widens_to(out_kind: str, in_kind: str) -> bool:
    return (out_kind, in_kind) in WIDENING


def compatible_type(out: DataType, in_: DataType, lexicon: SynonymLexicon = EMPTY_LEXICON) -> bool:
    """True when a value of type `out` can flow into a slot of type `in_`."""
    if isinstance(out, SimpleType) and isinstance(in_, SimpleType):
        return widens_to(out.kind, in_.kind)
    if isinstance(out, ComplexType) and isinstance(in_, ComplexType):
        for needed in in_.fields:
            if not any(
                names_match(have.name, needed.name, lexicon)
                and compatible_type(have.datatype, needed.datatype, lexicon)
                for have in out.fields
            ):
                return False
        return True
    return False


@dataclass(frozen=True)
class InconsistencyReport:
    upstream_task: str
    downstream_task: str
    param_name: str
    output_type: str
    input_type: str
    kind: str  # typeMismatch | missingProvider

    @property
    def severity(self) -> str:
        return "error" if self.kind == "typeMismatch" else "info"

    def to_json(self) -> dict:
        return {
            "upstreamTask": self.upstream_task,
            "downstreamTask": self.downstream_task,
            "paramName": self.param_name,
            "outputType": self.output_type,
            "inputType": self.input_type,
            "kind": self.kind,
            "severity": self.severity,
        }


def check_flows(
    process: AnnotatedProcess,
    lexicon: SynonymLexicon = EMPTY_LEXICON,
    all_ancestors: bool = True,
) -> list:
    """Compare each task input against name-matching upstream outputs.

    With all_ancestors every service task on any directed path upstream is a
    potential provider; otherwise only immediate service-task predecessors
    count. Inputs nothing upstream provides are externally supplied and
    reported at info severity only.
    """
    graph = process.graph
    reports = []
    for task_id in graph.service_task_ids():
        spec = process.specs.get(task_id)
        if spec is None:
            continue
        if all_ancestors:
            upstream_ids = sorted(
                n for n in graph.ancestors(task_id) if n in process.specs
            )
        else:
            upstream_ids = sorted(
                n for n in graph.predecessors(task_id) if n in process.specs
            )
        for param in spec.inputs:
            name_matched = []
            for upstream_id in upstream_ids:
                for out_param in process.specs[upstream_id].outputs:
                    if names_match(out_param.name, param.name, lexicon):
                        name_matched.append((upstream_id, out_param))
            if not name_matched:
                reports.append(InconsistencyReport(
                    upstream_task="",
                    downstream_task=task_id,
                    param_name=param.name,
                    output_type="",
                    input_type=format_datatype(param.datatype),
                    kind="missingProvider",
                ))
                continue
            if any(compatible_type(p.datatype, param.datatype, lexicon) for _, p in name_matched):
                continue
            for upstream_id, out_param in name_matched:
                reports.append(InconsistencyReport(
                    upstream_task=upstream_id,
                    downstream_task=task_id,
                    param_name=param.name,
                    output_type=format_datatype(out_param.datatype),
                    input_type=format_datatype(param.datatype),
                    kind="typeMismatch",
                ))
    return reports


def is_consistent(reports) -> bool:
    """Consistent means no type mismatches; info-level reports are fine."""
    return all(r.kind != "typeMismatch" for r in reports)
