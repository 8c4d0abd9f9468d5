"""Task spec sidecar parsing, weight validation, and annotation application."""
import json

import pytest

from taskweave.annotations import (
    AnnotatedProcess,
    TaskSpec,
    apply_annotations,
    parse_task_specs,
    specs_to_json,
    uniform_weights,
    validate_annotations,
)
from taskweave.bpmn import parse_bpmn
from taskweave.errors import (
    BadTargetError,
    DuplicateKeyError,
    MissingSpecError,
    ParseError,
)
from taskweave.model import DEFAULT_QOS_SCHEMA, Param, SimpleType
from taskweave.porter import stem

NS = 'xmlns:bpmn="http://www.omg.org/spec/BPMN/20100524/MODEL"'
ONE_TASK = (
    f'<bpmn:definitions {NS}><bpmn:process id="p1">'
    '<bpmn:startEvent id="s"/><bpmn:serviceTask id="t1" name="T"/><bpmn:endEvent id="e"/>'
    '<bpmn:sequenceFlow id="f1" sourceRef="s" targetRef="t1"/>'
    '<bpmn:sequenceFlow id="f2" sourceRef="t1" targetRef="e"/>'
    "</bpmn:process></bpmn:definitions>"
)


def spec_doc(tasks) -> str:
    return json.dumps({"processId": "p1", "tasks": tasks})


def valid_task(task_id="t1", **overrides) -> dict:
    body = {
        "taskId": task_id,
        "objective": "charge the customer card",
        "inputs": [{"name": "cardNumber", "type": "string"}],
        "outputs": [{"name": "paymentId", "type": "string"}],
        "weights": {"latency_ms": 0.25, "reliability": 0.25,
                    "throughput_rps": 0.25, "cost": 0.25},
    }
    body.update(overrides)
    return body


class TestParse:
    def test_round_trip(self):
        process_id, specs = parse_task_specs(spec_doc([valid_task()]))
        assert process_id == "p1"
        assert specs[0].inputs == (Param("cardNumber", SimpleType("string")),)
        reparsed_id, reparsed = parse_task_specs(specs_to_json("p1", specs))
        assert (reparsed_id, reparsed) == (process_id, specs)

    def test_missing_weights_parse_as_none(self):
        _, specs = parse_task_specs(spec_doc([valid_task(weights=None)]))
        assert specs[0].weights is None

    def test_complex_type_in_sidecar(self):
        task = valid_task(inputs=[{"name": "card", "type": {"number": "string", "cvv": "string"}}])
        _, specs = parse_task_specs(spec_doc([task]))
        assert specs[0].inputs[0].datatype.fields[0].name == "number"

    def test_not_json(self):
        with pytest.raises(ParseError):
            parse_task_specs("{oops")


class TestValidateWeights:
    def run(self, weights):
        spec = TaskSpec("t1", "x", (), (), weights)
        return validate_annotations([spec])

    def test_valid(self):
        assert self.run({"latency_ms": 0.5, "cost": 0.5}) == []

    def test_single_attribute_full_weight(self):
        assert self.run({"reliability": 1.0}) == []

    def test_unknown_attribute(self):
        errs = self.run({"speed": 1.0})
        assert errs and "speed" in errs[0].message

    def test_zero_weight_rejected(self):
        assert self.run({"latency_ms": 0.0, "cost": 1.0})

    def test_above_one_rejected(self):
        assert self.run({"latency_ms": 1.2})

    def test_sum_violation(self):
        errs = self.run({"latency_ms": 0.5, "cost": 0.4})
        assert errs and "sum" in errs[0].message

    def test_sum_tolerance(self):
        assert self.run({"latency_ms": 0.5, "cost": 0.5 + 5e-7}) == []

    def test_missing_weights_is_info_not_error(self):
        infos: list = []
        spec = TaskSpec("t1", "x", (), (), None)
        assert validate_annotations([spec], infos=infos) == []
        assert infos and "t1" in infos[0]


class TestUniformWeights:
    def test_default_schema(self):
        w = uniform_weights(DEFAULT_QOS_SCHEMA)
        assert set(w) == set(DEFAULT_QOS_SCHEMA.names())
        assert sum(w.values()) == pytest.approx(1.0)


class TestApply:
    def graph(self):
        return parse_bpmn(ONE_TASK)

    def spec(self, **overrides):
        task = valid_task(**overrides)
        _, specs = parse_task_specs(spec_doc([task]))
        return specs[0]

    def test_builds_annotated_process(self):
        annotated = apply_annotations(self.graph(), [self.spec()])
        assert isinstance(annotated, AnnotatedProcess)
        assert set(annotated.specs) == {"t1"}
        assert stem("charge") in annotated.task_keywords["t1"]
        assert stem("card") in annotated.task_keywords["t1"]

    def test_default_weights_filled(self):
        annotated = apply_annotations(self.graph(), [self.spec(weights=None)])
        assert annotated.specs["t1"].weights == uniform_weights(DEFAULT_QOS_SCHEMA)

    def test_duplicate_spec(self):
        with pytest.raises(DuplicateKeyError):
            apply_annotations(self.graph(), [self.spec(), self.spec()])

    def test_non_service_target(self):
        with pytest.raises(BadTargetError):
            apply_annotations(self.graph(), [self.spec(), self.spec(task_id="s")])

    def test_uncovered_service_task(self):
        with pytest.raises(MissingSpecError) as err:
            apply_annotations(self.graph(), [])
        assert err.value.task_id == "t1"
