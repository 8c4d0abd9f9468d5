"""Service registry: manifest parsing, execution-log aggregation, build.

The manifest is a JSON stand-in for a UDDI registry carrying exactly the
fields the binding pipeline consumes: categories (tModel records), business
entities, and per-service records with WSDL location, security and cost.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from statistics import fmean
from typing import Iterable, Mapping

from .errors import (
    DanglingReferenceError,
    DuplicateKeyError,
    MissingDescriptionError,
    ParseError,
)
from .model import (
    DEFAULT_QOS_SCHEMA,
    Param,
    QoSRecord,
    QoSSchema,
    datatype_from_json,
    datatype_to_json,
    qos_record_from_json,
    qos_record_to_json,
    schema_from_json,
    schema_to_json,
)
from .textkit import DEFAULT_STOP_WORDS, extract_keywords
from .wsdl import OperationSig, ServiceDescription

TRANSPORTS = ("none", "tls")
AUTHENTICATIONS = ("none", "basic", "token")


@dataclass(frozen=True)
class CategoryRecord:
    t_model_key: str
    name: str
    description: str


@dataclass(frozen=True)
class BusinessEntity:
    business_key: str
    business_name: str


@dataclass(frozen=True)
class SecurityInfo:
    transport: str = "none"
    authentication: str = "none"


@dataclass(frozen=True)
class ServiceRecord:
    service_key: str
    business_key: str
    name: str
    description: str
    category_key: str
    wsdl_location: str
    security: SecurityInfo
    cost: float


@dataclass(frozen=True)
class RegistryManifest:
    categories: tuple
    business_entities: tuple
    services: tuple

    def category(self, key: str) -> CategoryRecord:
        for c in self.categories:
            if c.t_model_key == key:
                return c
        raise KeyError(key)


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ParseError(f"missing {key!r} in {context}")
    return obj[key]


def parse_manifest(document: str) -> RegistryManifest:
    """Parse and cross-validate the registry manifest JSON."""
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed manifest JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(data, dict):
        raise ParseError("manifest must be a JSON object")

    categories = tuple(
        CategoryRecord(
            _require(c, "tModelKey", "category"),
            _require(c, "name", "category"),
            c.get("description", ""),
        )
        for c in data.get("categories", [])
    )
    businesses = tuple(
        BusinessEntity(
            _require(b, "businessKey", "businessEntity"),
            _require(b, "businessName", "businessEntity"),
        )
        for b in data.get("businessEntities", [])
    )

    cat_keys = {c.t_model_key for c in categories}
    if len(cat_keys) != len(categories):
        raise DuplicateKeyError("tModelKey", context="categories")
    biz_keys = {b.business_key for b in businesses}

    services = []
    seen = set()
    for s in data.get("services", []):
        key = _require(s, "serviceKey", "service")
        if key in seen:
            raise DuplicateKeyError(key, context="services")
        seen.add(key)
        business_key = _require(s, "businessKey", f"service {key!r}")
        category_key = _require(s, "categoryKey", f"service {key!r}")
        wsdl_location = _require(s, "wsdl", f"service {key!r}")
        if business_key not in biz_keys:
            raise DanglingReferenceError(business_key, context=f"service {key!r} businessKey")
        if category_key not in cat_keys:
            raise DanglingReferenceError(category_key, context=f"service {key!r} categoryKey")
        if not wsdl_location:
            raise ParseError(f"service {key!r} declares an empty wsdl location")
        sec = s.get("security", {})
        security = SecurityInfo(sec.get("transport", "none"), sec.get("authentication", "none"))
        if security.transport not in TRANSPORTS or security.authentication not in AUTHENTICATIONS:
            raise ParseError(f"service {key!r} has invalid security settings")
        cost = float(s.get("cost", 0.0))
        if cost < 0:
            raise ParseError(f"service {key!r} has negative cost")
        services.append(ServiceRecord(
            key, business_key, s.get("name", ""), s.get("description", ""),
            category_key, wsdl_location, security, cost,
        ))

    return RegistryManifest(categories, businesses, tuple(services))


@dataclass(frozen=True)
class ExecutionLogLine:
    ts: str
    service_key: str
    operation: str
    duration_ms: float
    success: bool


def parse_log_lines(document: str, warnings: list | None = None) -> list:
    """Parse JSON Lines execution logs; malformed lines are skipped."""
    sink = warnings if warnings is not None else []
    lines = []
    for lineno, raw in enumerate(document.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
            lines.append(ExecutionLogLine(
                ts=str(obj["ts"]),
                service_key=str(obj["serviceKey"]),
                operation=str(obj.get("operation", "")),
                duration_ms=float(obj["duration_ms"]),
                success=bool(obj["success"]),
            ))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            sink.append(f"log line {lineno} skipped: malformed")
    return lines


def _parse_ts(value: str) -> datetime:
    return datetime.fromisoformat(value.replace("Z", "+00:00"))


def aggregate_qos(
    log_lines: Iterable[ExecutionLogLine],
    schema: QoSSchema = DEFAULT_QOS_SCHEMA,
    warnings: list | None = None,
) -> dict:
    """Aggregate per-service QoS from execution logs.

    latency_ms is the mean duration of successful calls, reliability the
    success ratio, throughput_rps total calls over the observed time span
    (omitted for a single call or a zero span). Lines with a negative
    duration or unparseable timestamp are skipped and tallied.
    """
    sink = warnings if warnings is not None else []
    per_service: dict[str, dict] = {}
    skipped = 0
    for line in log_lines:
        try:
            ts = _parse_ts(line.ts)
        except ValueError:
            skipped += 1
            continue
        if line.duration_ms < 0:
            skipped += 1
            continue
        acc = per_service.setdefault(line.service_key, {"times": [], "ok_durations": [], "total": 0, "ok": 0})
        acc["times"].append(ts)
        acc["total"] += 1
        if line.success:
            acc["ok"] += 1
            acc["ok_durations"].append(line.duration_ms)
    if skipped:
        sink.append(f"{skipped} log line(s) skipped (negative duration or bad timestamp)")

    known = set(schema.names())
    records = {}
    for key in sorted(per_service):
        acc = per_service[key]
        values = {}
        if acc["ok_durations"] and "latency_ms" in known:
            values["latency_ms"] = fmean(acc["ok_durations"])
        if "reliability" in known:
            values["reliability"] = acc["ok"] / acc["total"]
        span = (max(acc["times"]) - min(acc["times"])).total_seconds()
        if acc["total"] > 1 and span > 0 and "throughput_rps" in known:
            values["throughput_rps"] = acc["total"] / span
        records[key] = QoSRecord(values, sample_count=acc["total"])
    return records


@dataclass(frozen=True)
class ServiceEntry:
    record: ServiceRecord
    description: ServiceDescription
    qos: QoSRecord
    keywords: frozenset


@dataclass(frozen=True)
class CategoryEntry:
    record: CategoryRecord
    keywords: frozenset


@dataclass(frozen=True)
class ServiceRegistry:
    """Immutable view over everything the matcher needs. Rebuild to change."""

    categories: dict
    services: dict
    business_entities: tuple
    schema: QoSSchema

    def operations(self) -> list:
        """All (serviceKey, OperationSig) pairs in deterministic order."""
        pairs = []
        for key in sorted(self.services):
            for op in self.services[key].description.operations:
                pairs.append((key, op))
        return pairs


def _service_keyword_text(record: ServiceRecord, description: ServiceDescription) -> str:
    parts = [record.description, record.name]
    for op in description.operations:
        parts.append(op.name)
        parts.append(op.description)
        parts.extend(p.name for p in op.inputs)
        parts.extend(p.name for p in op.outputs)
    return " ".join(p for p in parts if p)


def build_registry(
    manifest: RegistryManifest,
    wsdls: Mapping[str, ServiceDescription],
    qos: Mapping[str, QoSRecord],
    schema: QoSSchema = DEFAULT_QOS_SCHEMA,
    stop_words: frozenset = DEFAULT_STOP_WORDS,
) -> ServiceRegistry:
    """Assemble the registry: keyword sets per service and category, QoS
    records completed with the manifest cost."""
    known = set(schema.names())
    services = {}
    for record in manifest.services:
        if record.service_key not in wsdls:
            raise MissingDescriptionError(record.service_key)
        description = wsdls[record.service_key]
        base = qos.get(record.service_key, QoSRecord())
        values = {k: v for k, v in base.values.items() if k in known}
        if "cost" in known and "cost" not in values:
            values["cost"] = record.cost
        rec = QoSRecord(values, base.sample_count)
        rec.validate(schema)
        keywords = extract_keywords(_service_keyword_text(record, description), stop_words)
        services[record.service_key] = ServiceEntry(record, description, rec, keywords)

    categories = {}
    for cat in manifest.categories:
        member_parts = [cat.description]
        for record in manifest.services:
            if record.category_key == cat.t_model_key:
                member_parts.append(record.name)
                member_parts.append(record.description)
        keywords = extract_keywords(" ".join(p for p in member_parts if p), stop_words)
        categories[cat.t_model_key] = CategoryEntry(cat, keywords)

    return ServiceRegistry(categories, services, manifest.business_entities, schema)


def _operation_to_json(op: OperationSig) -> dict:
    def params(ps):
        return [{"name": p.name, "type": datatype_to_json(p.datatype)} for p in ps]

    return {
        "name": op.name,
        "description": op.description,
        "inputs": params(op.inputs),
        "outputs": params(op.outputs),
    }


def _operation_from_json(obj: dict) -> OperationSig:
    def params(items):
        return tuple(Param(i["name"], datatype_from_json(i["type"])) for i in items)

    return OperationSig(obj["name"], obj.get("description", ""), params(obj["inputs"]), params(obj["outputs"]))


def registry_to_json(registry: ServiceRegistry) -> str:
    """Deterministic JSON snapshot (sorted keys, sorted keyword lists)."""
    doc = {
        "schema": schema_to_json(registry.schema),
        "businessEntities": [
            {"businessKey": b.business_key, "businessName": b.business_name}
            for b in sorted(registry.business_entities, key=lambda b: b.business_key)
        ],
        "categories": {
            key: {
                "record": {
                    "tModelKey": e.record.t_model_key,
                    "name": e.record.name,
                    "description": e.record.description,
                },
                "keywords": sorted(e.keywords),
            }
            for key, e in sorted(registry.categories.items())
        },
        "services": {
            key: {
                "record": {
                    "serviceKey": e.record.service_key,
                    "businessKey": e.record.business_key,
                    "name": e.record.name,
                    "description": e.record.description,
                    "categoryKey": e.record.category_key,
                    "wsdl": e.record.wsdl_location,
                    "security": {
                        "transport": e.record.security.transport,
                        "authentication": e.record.security.authentication,
                    },
                    "cost": e.record.cost,
                },
                "description": {
                    "endpointAddress": e.description.endpoint_address,
                    "interfaceName": e.description.interface_name,
                    "operations": [_operation_to_json(op) for op in e.description.operations],
                },
                "qos": qos_record_to_json(e.qos),
                "keywords": sorted(e.keywords),
            }
            for key, e in sorted(registry.services.items())
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def registry_from_json(document: str) -> ServiceRegistry:
    doc = json.loads(document)
    schema = schema_from_json(doc["schema"])
    categories = {}
    for key, e in doc["categories"].items():
        rec = e["record"]
        categories[key] = CategoryEntry(
            CategoryRecord(rec["tModelKey"], rec["name"], rec["description"]),
            frozenset(e["keywords"]),
        )
    services = {}
    for key, e in doc["services"].items():
        rec = e["record"]
        record = ServiceRecord(
            rec["serviceKey"], rec["businessKey"], rec["name"], rec["description"],
            rec["categoryKey"], rec["wsdl"],
            SecurityInfo(rec["security"]["transport"], rec["security"]["authentication"]),
            float(rec["cost"]),
        )
        desc = e["description"]
        description = ServiceDescription(
            tuple(_operation_from_json(o) for o in desc["operations"]),
            desc["endpointAddress"],
            desc["interfaceName"],
        )
        services[key] = ServiceEntry(record, description, qos_record_from_json(e["qos"]), frozenset(e["keywords"]))
    businesses = tuple(
        BusinessEntity(b["businessKey"], b["businessName"]) for b in doc["businessEntities"]
    )
    return ServiceRegistry(categories, services, businesses, schema)
