"""WSDL 1.1 reader.

Covers document-style services with locally declared types: portType
operations, message parts (``type=`` simple/named-complex or ``element=``
schema element with doc-literal unwrapping), and the first port's SOAP
address. Network imports and SOAP headers are skipped with a warning.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .errors import DanglingReferenceError, DataTypeError, DuplicateKeyError, ParseError
from .model import ComplexType, MAX_TYPE_DEPTH, Param, SimpleType

WSDL_NS = "http://schemas.xmlsoap.org/wsdl/"
XSD_NS = "http://www.w3.org/2001/XMLSchema"
SOAP_NS = "http://schemas.xmlsoap.org/wsdl/soap/"
SOAP12_NS = "http://schemas.xmlsoap.org/wsdl/soap12/"

_XSD_KIND_MAP = {
    "string": "string",
    "normalizedString": "string",
    "token": "string",
    "anyURI": "string",
    "boolean": "boolean",
    "byte": "integer",
    "short": "integer",
    "int": "integer",
    "integer": "integer",
    "nonNegativeInteger": "integer",
    "positiveInteger": "integer",
    "unsignedShort": "integer",
    "unsignedInt": "long",
    "long": "long",
    "unsignedLong": "long",
    "float": "float",
    "double": "double",
    "decimal": "double",
    "date": "date",
    "dateTime": "dateTime",
}


@dataclass(frozen=True)
class OperationSig:
    name: str
    description: str
    inputs: tuple
    outputs: tuple


@dataclass(frozen=True)
class ServiceDescription:
    operations: tuple
    endpoint_address: str
    interface_name: str

    def operation(self, name: str) -> OperationSig:
        for op in self.operations:
            if op.name == name:
                return op
        raise KeyError(name)


def _local(qname: str) -> str:
    return qname.split(":")[-1] if qname else ""


def _doc_text(element) -> str:
    doc = element.find(f"{{{WSDL_NS}}}documentation")
    if doc is None:
        return ""
    return " ".join("".join(doc.itertext()).split())


class _SchemaIndex:
    """Named complex types and top-level element declarations."""

    def __init__(self, root, warnings: list):
        self.complex_types: dict[str, ET.Element] = {}
        self.elements: dict[str, ET.Element] = {}
        self.warnings = warnings
        for schema in root.iter(f"{{{XSD_NS}}}schema"):
            for child in schema:
                tag = child.tag
                if tag == f"{{{XSD_NS}}}complexType" and child.get("name"):
                    self.complex_types[child.get("name")] = child
                elif tag == f"{{{XSD_NS}}}element" and child.get("name"):
                    self.elements[child.get("name")] = child
                elif tag == f"{{{XSD_NS}}}import":
                    self.warnings.append("schema import skipped (remote imports unsupported)")

    def _simple_kind(self, qname: str):
        name = _local(qname)
        if name in _XSD_KIND_MAP:
            return SimpleType(_XSD_KIND_MAP[name])
        return None

    def resolve_type(self, qname: str, depth: int = 1):
        simple = self._simple_kind(qname)
        if simple is not None:
            return simple
        name = _local(qname)
        if name in self.complex_types:
            return self._parse_complex(self.complex_types[name], depth)
        self.warnings.append(f"unknown type {qname!r} treated as string")
        return SimpleType("string")

    def _parse_complex(self, ct_el, depth: int):
        if depth > MAX_TYPE_DEPTH:
            raise DataTypeError(f"datatype nesting exceeds {MAX_TYPE_DEPTH} levels")
        fields = []
        for seq_tag in ("sequence", "all"):
            container = ct_el.find(f"{{{XSD_NS}}}{seq_tag}")
            if container is None:
                continue
            for el in container.findall(f"{{{XSD_NS}}}element"):
                fields.append(self._element_param(el, depth + 1))
        if not fields:
            raise DataTypeError("complex type must declare at least one field")
        return ComplexType(tuple(fields))

    def _element_param(self, el, depth: int) -> Param:
        name = el.get("name", "")
        type_attr = el.get("type")
        if type_attr:
            return Param(name, self.resolve_type(type_attr, depth))
        inline = el.find(f"{{{XSD_NS}}}complexType")
        if inline is not None:
            return Param(name, self._parse_complex(inline, depth))
        self.warnings.append(f"element {name!r} has no usable type, treated as string")
        return Param(name, SimpleType("string"))

    def resolve_element(self, qname: str):
        name = _local(qname)
        if name not in self.elements:
            raise DanglingReferenceError(qname, context="schema elements")
        el = self.elements[name]
        type_attr = el.get("type")
        if type_attr:
            return name, self.resolve_type(type_attr)
        inline = el.find(f"{{{XSD_NS}}}complexType")
        if inline is not None:
            return name, self._parse_complex(inline, depth=1)
        return name, SimpleType("string")


def _message_params(msg_el, schema: _SchemaIndex) -> tuple:
    params = []
    for part in msg_el.findall(f"{{{WSDL_NS}}}part"):
        part_name = part.get("name", "")
        type_attr = part.get("type")
        element_attr = part.get("element")
        if type_attr:
            params.append(Param(part_name, schema.resolve_type(type_attr)))
        elif element_attr:
            el_name, datatype = schema.resolve_element(element_attr)
            if isinstance(datatype, ComplexType):
                params.extend(datatype.fields)  # doc-literal wrapper: unwrap
            else:
                params.append(Param(el_name, datatype))
        else:
            schema.warnings.append(f"message part {part_name!r} has neither type nor element")
    return tuple(params)


def parse_wsdl(document: str, warnings: list | None = None) -> ServiceDescription:
    """Parse a WSDL 1.1 document into a ServiceDescription.

    Raises ParseError on malformed XML (with line/column) and
    DanglingReferenceError when an operation names an undefined message.
    """
    sink = warnings if warnings is not None else []
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise ParseError(f"malformed WSDL: {exc.msg.split(':')[0]}", line=line, column=column) from exc
    if root.tag != f"{{{WSDL_NS}}}definitions":
        raise ParseError(f"not a WSDL 1.1 document (root {root.tag!r})")

    for imp in root.findall(f"{{{WSDL_NS}}}import"):
        sink.append(f"wsdl import {imp.get('location')!r} skipped")

    schema = _SchemaIndex(root, sink)

    messages = {}
    for msg in root.findall(f"{{{WSDL_NS}}}message"):
        messages[msg.get("name", "")] = msg

    port_types = root.findall(f"{{{WSDL_NS}}}portType")
    interface_name = ""
    operations = []
    if not port_types:
        sink.append("no portType declared")
    else:
        port_type = port_types[0]
        interface_name = port_type.get("name", "")
        seen = set()
        for op_el in port_type.findall(f"{{{WSDL_NS}}}operation"):
            op_name = op_el.get("name", "")
            if op_name in seen:
                raise DuplicateKeyError(op_name, context=f"portType {interface_name!r}")
            seen.add(op_name)
            sides = {}
            for side in ("input", "output"):
                child = op_el.find(f"{{{WSDL_NS}}}{side}")
                if child is None:
                    sides[side] = ()
                    continue
                msg_name = _local(child.get("message", ""))
                if msg_name not in messages:
                    raise DanglingReferenceError(msg_name, context=f"operation {op_name!r}")
                sides[side] = _message_params(messages[msg_name], schema)
            operations.append(OperationSig(op_name, _doc_text(op_el), sides["input"], sides["output"]))
    if not operations:
        sink.append("service description declares no operations")

    for header in root.iter(f"{{{SOAP_NS}}}header"):
        sink.append("SOAP header ignored")
        break

    endpoint = ""
    for service in root.findall(f"{{{WSDL_NS}}}service"):
        for port in service.findall(f"{{{WSDL_NS}}}port"):
            for ns in (SOAP_NS, SOAP12_NS):
                address = port.find(f"{{{ns}}}address")
                if address is not None and address.get("location"):
                    endpoint = address.get("location")
                    break
            if endpoint:
                break
        if endpoint:
            break
    if not endpoint:
        sink.append("no SOAP address found; endpoint left empty")

    return ServiceDescription(tuple(operations), endpoint, interface_name)
