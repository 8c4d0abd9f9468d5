"""Datatype widening, complex-type coverage, and flow checking."""
import pytest

from taskweave.annotations import AnnotatedProcess, TaskSpec
from taskweave.bpmn import Edge, NodeKind, ProcessGraph
from taskweave.consistency import (
    WIDENING,
    check_flows,
    compatible_type,
    is_consistent,
    widens_to,
)
from taskweave.model import SIMPLE_KINDS, ComplexType, Param, SimpleType
from taskweave.textkit import load_lexicon

S = SimpleType


def closure_oracle() -> set:
    """Reflexive-transitive closure of the widening chain, built independently."""
    edges = {("integer", "long"), ("long", "float"), ("float", "double"), ("date", "dateTime")}
    pairs = {(k, k) for k in SIMPLE_KINDS} | edges
    changed = True
    while changed:
        changed = False
        for a, b in list(pairs):
            for c, d in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return pairs


class TestWidening:
    def test_exhaustive_table(self):
        oracle = closure_oracle()
        for out_kind in SIMPLE_KINDS:
            for in_kind in SIMPLE_KINDS:
                expected = (out_kind, in_kind) in oracle
                assert widens_to(out_kind, in_kind) == expected, (out_kind, in_kind)
                assert compatible_type(S(out_kind), S(in_kind)) == expected

    def test_flagship_pairs(self):
        assert not compatible_type(S("string"), S("float"))
        assert compatible_type(S("integer"), S("float"))
        assert compatible_type(S("integer"), S("double"))  # transitive
        assert compatible_type(S("date"), S("dateTime"))
        assert not compatible_type(S("dateTime"), S("date"))
        assert not compatible_type(S("float"), S("integer"))  # no narrowing
        assert not compatible_type(S("float"), S("string"))  # no stringify

    def test_exported_table_matches_oracle(self):
        assert set(WIDENING) == closure_oracle()


class TestComplexTypes:
    MONEY_OUT = ComplexType((Param("amount", S("integer")), Param("currency", S("string"))))
    MONEY_IN = ComplexType((Param("amount", S("float")),))

    def test_field_coverage_with_widening(self):
        # every required input field satisfied by a name-matched output field
        assert compatible_type(self.MONEY_OUT, self.MONEY_IN)

    def test_missing_field(self):
        needs_tax = ComplexType((Param("amount", S("float")), Param("tax", S("float"))))
        assert not compatible_type(self.MONEY_OUT, needs_tax)

    def test_incompatible_field_type(self):
        string_amount = ComplexType((Param("amount", S("string")),))
        assert not compatible_type(string_amount, self.MONEY_IN)

    def test_synonym_field_names(self):
        lex = load_lexicon("amount|total\n")
        total_out = ComplexType((Param("total", S("integer")),))
        assert compatible_type(total_out, self.MONEY_IN, lex)
        assert not compatible_type(total_out, self.MONEY_IN)

    def test_recursive_nesting(self):
        inner_out = ComplexType((Param("value", S("long")),))
        inner_in = ComplexType((Param("value", S("float")),))
        assert compatible_type(
            ComplexType((Param("box", inner_out),)),
            ComplexType((Param("box", inner_in),)),
        )
        assert not compatible_type(
            ComplexType((Param("box", inner_in),)),
            ComplexType((Param("box", inner_out),)),
        )

    def test_mixed_shapes_false(self):
        assert not compatible_type(S("string"), self.MONEY_IN)
        assert not compatible_type(self.MONEY_OUT, S("string"))


def chain(*task_specs, edges=None):
    """Linear process start -> t1 -> t2 ... -> end built straight from parts."""
    ids = [s.task_id for s in task_specs]
    nodes = {"start": NodeKind.START_EVENT, "end": NodeKind.END_EVENT}
    nodes.update({t: NodeKind.SERVICE_TASK for t in ids})
    if edges is None:
        hops = ["start", *ids, "end"]
        edges = tuple(
            Edge(f"f{i}", a, b) for i, (a, b) in enumerate(zip(hops, hops[1:]))
        )
    graph = ProcessGraph("p", nodes, edges, {})
    return AnnotatedProcess(graph, {s.task_id: s for s in task_specs}, {t: frozenset() for t in ids})


def spec(task_id, inputs=(), outputs=()):
    return TaskSpec(
        task_id,
        "",
        tuple(Param(n, S(k)) for n, k in inputs),
        tuple(Param(n, S(k)) for n, k in outputs),
        {"latency_ms": 1.0},
    )


class TestCheckFlows:
    def test_widening_flow_clean(self):
        process = chain(
            spec("a", outputs=[("amount", "integer")]),
            spec("b", inputs=[("amount", "float")]),
        )
        assert check_flows(process) == []
        assert is_consistent(check_flows(process))

    def test_type_mismatch_reported(self):
        process = chain(
            spec("a", outputs=[("amount", "string")]),
            spec("b", inputs=[("amount", "float")]),
        )
        reports = check_flows(process)
        assert len(reports) == 1
        r = reports[0]
        assert (r.kind, r.severity) == ("typeMismatch", "error")
        assert (r.upstream_task, r.downstream_task, r.param_name) == ("a", "b", "amount")
        assert (r.output_type, r.input_type) == ("string", "float")
        assert not is_consistent(reports)

    def test_synonym_name_match(self):
        lex = load_lexicon("total|sum\n")
        process = chain(
            spec("a", outputs=[("total", "float")]),
            spec("b", inputs=[("sum", "float")]),
        )
        assert check_flows(process, lexicon=lex) == []
        # without the lexicon the input has no provider at all: info only
        reports = check_flows(process)
        assert [r.kind for r in reports] == ["missingProvider"]
        assert is_consistent(reports)

    def test_missing_provider_info(self):
        process = chain(spec("a", inputs=[("origin", "string")]))
        reports = check_flows(process)
        assert len(reports) == 1
        assert reports[0].kind == "missingProvider"
        assert reports[0].severity == "info"
        assert reports[0].upstream_task == ""

    def test_any_compatible_provider_wins(self):
        # one bad provider is fine as long as a good one exists upstream
        process = chain(
            spec("a", outputs=[("amount", "string")]),
            spec("b", outputs=[("amount", "integer")]),
            spec("c", inputs=[("amount", "float")]),
        )
        assert check_flows(process) == []

    def test_all_name_matched_providers_bad(self):
        process = chain(
            spec("a", outputs=[("amount", "string")]),
            spec("b", outputs=[("amount", "boolean")]),
            spec("c", inputs=[("amount", "float")]),
        )
        reports = check_flows(process)
        assert sorted(r.upstream_task for r in reports) == ["a", "b"]
        assert all(r.kind == "typeMismatch" for r in reports)

    def test_ancestor_vs_immediate_mode(self):
        process = chain(
            spec("a", outputs=[("amount", "float")]),
            spec("b"),
            spec("c", inputs=[("amount", "float")]),
        )
        assert check_flows(process, all_ancestors=True) == []
        reports = check_flows(process, all_ancestors=False)
        assert [r.kind for r in reports] == ["missingProvider"]

    def test_edge_order_irrelevant(self):
        specs = (
            spec("a", outputs=[("x", "integer")]),
            spec("b", inputs=[("x", "float")], outputs=[("y", "integer")]),
            spec("c", inputs=[("y", "double")]),
        )
        hops = ["start", "a", "b", "c", "end"]
        edges = [Edge(f"f{i}", s, t) for i, (s, t) in enumerate(zip(hops, hops[1:]))]
        forward = chain(*specs, edges=tuple(edges))
        backward = chain(*specs, edges=tuple(reversed(edges)))
        assert check_flows(forward) == check_flows(backward)

    def test_json_shape(self):
        process = chain(
            spec("a", outputs=[("amount", "string")]),
            spec("b", inputs=[("amount", "float")]),
        )
        j = check_flows(process)[0].to_json()
        assert j == {
            "kind": "typeMismatch",
            "severity": "error",
            "upstreamTask": "a",
            "downstreamTask": "b",
            "paramName": "amount",
            "outputType": "string",
            "inputType": "float",
        }
