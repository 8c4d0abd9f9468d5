"""Parameter, datatype and QoS primitives shared by registry and process."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .errors import DataTypeError

SIMPLE_KINDS = (
    "boolean", "integer", "long", "float", "double", "string", "date", "dateTime",
)

MAX_TYPE_DEPTH = 8


@dataclass(frozen=True)
class SimpleType:
    kind: str

    def __post_init__(self):
        if self.kind not in SIMPLE_KINDS:
            raise DataTypeError(f"unknown simple kind {self.kind!r}")


@dataclass(frozen=True)
class ComplexType:
    fields: tuple

    def __post_init__(self):
        if not self.fields:
            raise DataTypeError("complex type must declare at least one field")


DataType = Union[SimpleType, ComplexType]


@dataclass(frozen=True)
class Param:
    name: str
    datatype: DataType

    def __post_init__(self):
        if not self.name.strip():
            raise DataTypeError("parameter name must be nonempty")


def type_depth(dt: DataType) -> int:
    if isinstance(dt, SimpleType):
        return 1
    return 1 + max(type_depth(f.datatype) for f in dt.fields)


def check_depth(dt: DataType) -> DataType:
    if type_depth(dt) > MAX_TYPE_DEPTH:
        raise DataTypeError(f"datatype nesting exceeds {MAX_TYPE_DEPTH} levels")
    return dt


def format_datatype(dt: DataType) -> str:
    """Compact human-readable form: ``float`` or ``{amount:float,...}``."""
    if isinstance(dt, SimpleType):
        return dt.kind
    inner = ",".join(f"{f.name}:{format_datatype(f.datatype)}" for f in dt.fields)
    return "{" + inner + "}"


def datatype_to_json(dt: DataType):
    if isinstance(dt, SimpleType):
        return dt.kind
    return {f.name: datatype_to_json(f.datatype) for f in dt.fields}


def datatype_from_json(value) -> DataType:
    """Parse the sidecar type notation: a simple-kind name or an inline
    ``{field: type, ...}`` object (arbitrarily nested up to the depth cap)."""
    if isinstance(value, str):
        return SimpleType(value)
    if isinstance(value, dict) and value:
        fields = tuple(Param(name, datatype_from_json(sub)) for name, sub in value.items())
        return check_depth(ComplexType(fields))
    raise DataTypeError(f"cannot parse datatype from {value!r}")


@dataclass(frozen=True)
class QoSAttribute:
    name: str
    direction: str  # "maximize" | "minimize"
    unit: str = ""

    def __post_init__(self):
        if self.direction not in ("maximize", "minimize"):
            raise DataTypeError(f"bad QoS direction {self.direction!r}")


@dataclass(frozen=True)
class QoSSchema:
    attributes: tuple

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(names) != len(set(names)):
            raise DataTypeError("QoS attribute names must be unique")

    def names(self) -> tuple:
        return tuple(a.name for a in self.attributes)

    def direction(self, name: str) -> str:
        for a in self.attributes:
            if a.name == name:
                return a.direction
        raise KeyError(name)

    def maximize_names(self) -> tuple:
        return tuple(a.name for a in self.attributes if a.direction == "maximize")

    def minimize_names(self) -> tuple:
        return tuple(a.name for a in self.attributes if a.direction == "minimize")


DEFAULT_QOS_SCHEMA = QoSSchema((
    QoSAttribute("latency_ms", "minimize", "ms"),
    QoSAttribute("reliability", "maximize", "ratio"),
    QoSAttribute("throughput_rps", "maximize", "1/s"),
    QoSAttribute("cost", "minimize", "currency"),
))


@dataclass(frozen=True)
class QoSRecord:
    """Measured or declared attribute values for one service. Attributes a
    service has no data for are simply absent; the ranking imputes them."""

    values: dict = field(default_factory=dict)
    sample_count: int = 0

    def validate(self, schema: QoSSchema) -> None:
        known = set(schema.names())
        for name, value in self.values.items():
            if name not in known:
                raise DataTypeError(f"QoS value for unknown attribute {name!r}")
            if not math.isfinite(value):
                raise DataTypeError(f"QoS value for {name!r} is not finite")
        if self.sample_count < 0:
            raise DataTypeError("sample count must be non-negative")


def qos_record_to_json(record: QoSRecord) -> dict:
    return {
        "values": {k: record.values[k] for k in sorted(record.values)},
        "sampleCount": record.sample_count,
    }


def qos_record_from_json(obj: dict) -> QoSRecord:
    return QoSRecord(dict(obj.get("values", {})), int(obj.get("sampleCount", 0)))


def schema_to_json(schema: QoSSchema) -> list:
    return [
        {"name": a.name, "direction": a.direction, "unit": a.unit}
        for a in schema.attributes
    ]


def schema_from_json(items: list) -> QoSSchema:
    return QoSSchema(tuple(
        QoSAttribute(i["name"], i["direction"], i.get("unit", "")) for i in items
    ))
