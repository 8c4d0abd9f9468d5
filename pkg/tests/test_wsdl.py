"""Service description parsing: doc-literal wrappers, rpc-style parts, errors."""
import pytest

from taskweave.errors import DanglingReferenceError, DataTypeError, DuplicateKeyError, ParseError
from taskweave.model import ComplexType, SimpleType
from taskweave.wsdl import parse_wsdl

DOC_STYLE = """<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
             xmlns:soap="http://schemas.xmlsoap.org/wsdl/soap/"
             xmlns:xsd="http://www.w3.org/2001/XMLSchema"
             xmlns:tns="urn:t" targetNamespace="urn:t" name="Quotes">
  <types>
    <xsd:schema targetNamespace="urn:t">
      <xsd:element name="getQuoteRequest">
        <xsd:complexType><xsd:sequence>
          <xsd:element name="flightId" type="xsd:string"/>
          <xsd:element name="travelDate" type="xsd:date"/>
        </xsd:sequence></xsd:complexType>
      </xsd:element>
      <xsd:element name="getQuoteResponse">
        <xsd:complexType><xsd:sequence>
          <xsd:element name="fare" type="xsd:float"/>
        </xsd:sequence></xsd:complexType>
      </xsd:element>
    </xsd:schema>
  </types>
  <message name="getQuoteInput"><part name="parameters" element="tns:getQuoteRequest"/></message>
  <message name="getQuoteOutput"><part name="parameters" element="tns:getQuoteResponse"/></message>
  <portType name="QuotePortType">
    <operation name="getQuote">
      <documentation>quote a fare for a flight</documentation>
      <input message="tns:getQuoteInput"/>
      <output message="tns:getQuoteOutput"/>
    </operation>
  </portType>
  <service name="QuoteService">
    <port name="QuotePort" binding="tns:QuoteBinding">
      <soap:address location="https://quotes.example/soap"/>
    </port>
  </service>
</definitions>
"""

RPC_STYLE = """<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
             xmlns:soap="http://schemas.xmlsoap.org/wsdl/soap/"
             xmlns:xsd="http://www.w3.org/2001/XMLSchema"
             xmlns:tns="urn:t" targetNamespace="urn:t" name="Status">
  <message name="getStatusInput"><part name="flightId" type="xsd:string"/></message>
  <message name="getStatusOutput">
    <part name="status" type="xsd:string"/>
    <part name="delayMinutes" type="xsd:int"/>
  </message>
  <portType name="StatusPortType">
    <operation name="getStatus">
      <input message="tns:getStatusInput"/>
      <output message="tns:getStatusOutput"/>
    </operation>
  </portType>
  <service name="StatusService">
    <port name="StatusPort" binding="tns:StatusBinding">
      <soap:address location="https://status.example/soap"/>
    </port>
  </service>
</definitions>
"""


class TestDocLiteral:
    def test_wrapper_unwrapping(self):
        desc = parse_wsdl(DOC_STYLE)
        op = desc.operation("getQuote")
        assert [(p.name, p.datatype) for p in op.inputs] == [
            ("flightId", SimpleType("string")),
            ("travelDate", SimpleType("date")),
        ]
        assert [(p.name, p.datatype) for p in op.outputs] == [("fare", SimpleType("float"))]

    def test_documentation_and_endpoint(self):
        desc = parse_wsdl(DOC_STYLE)
        assert desc.operation("getQuote").description == "quote a fare for a flight"
        assert desc.endpoint_address == "https://quotes.example/soap"
        assert desc.interface_name == "QuotePortType"


class TestRpcStyle:
    def test_typed_parts(self):
        desc = parse_wsdl(RPC_STYLE)
        op = desc.operation("getStatus")
        assert [(p.name, p.datatype.kind) for p in op.inputs] == [("flightId", "string")]
        assert [(p.name, p.datatype.kind) for p in op.outputs] == [
            ("status", "string"),
            ("delayMinutes", "integer"),
        ]


class TestNamedComplexTypes:
    def test_named_type_reference(self):
        doc = """<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <types><xsd:schema>
            <xsd:complexType name="Money"><xsd:sequence>
              <xsd:element name="amount" type="xsd:double"/>
              <xsd:element name="currency" type="xsd:string"/>
            </xsd:sequence></xsd:complexType>
          </xsd:schema></types>
          <message name="in"><part name="price" type="tns:Money"/></message>
          <message name="out"><part name="ok" type="xsd:boolean"/></message>
          <portType name="P"><operation name="pay">
            <input message="tns:in"/><output message="tns:out"/>
          </operation></portType>
        </definitions>"""
        desc = parse_wsdl(doc)
        price = desc.operation("pay").inputs[0]
        assert isinstance(price.datatype, ComplexType)
        assert [f.name for f in price.datatype.fields] == ["amount", "currency"]

    def test_empty_complex_type_rejected(self):
        doc = """<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <types><xsd:schema>
            <xsd:complexType name="Empty"><xsd:sequence/></xsd:complexType>
          </xsd:schema></types>
          <message name="in"><part name="x" type="tns:Empty"/></message>
          <message name="out"><part name="y" type="xsd:string"/></message>
          <portType name="P"><operation name="op">
            <input message="tns:in"/><output message="tns:out"/>
          </operation></portType>
        </definitions>"""
        with pytest.raises(DataTypeError):
            parse_wsdl(doc)

    def test_nesting_depth_cap(self):
        levels = 10
        type_defs = []
        for i in range(levels):
            inner = "xsd:string" if i == levels - 1 else f"tns:L{i + 1}"
            type_defs.append(
                f'<xsd:complexType name="L{i}"><xsd:sequence>'
                f'<xsd:element name="f{i}" type="{inner}"/>'
                f"</xsd:sequence></xsd:complexType>"
            )
        doc = f"""<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <types><xsd:schema>{''.join(type_defs)}</xsd:schema></types>
          <message name="in"><part name="x" type="tns:L0"/></message>
          <message name="out"><part name="y" type="xsd:string"/></message>
          <portType name="P"><operation name="op">
            <input message="tns:in"/><output message="tns:out"/>
          </operation></portType>
        </definitions>"""
        with pytest.raises(DataTypeError, match="nesting"):
            parse_wsdl(doc)


class TestErrors:
    def test_malformed_xml_has_position(self):
        with pytest.raises(ParseError) as err:
            parse_wsdl("<definitions><unclosed></definitions>")
        assert err.value.line is not None

    def test_wrong_root(self):
        with pytest.raises(ParseError, match="not a WSDL"):
            parse_wsdl("<other/>")

    def test_missing_message_reference(self):
        doc = """<definitions xmlns="http://schemas.xmlsoap.org/wsdl/" xmlns:tns="urn:t">
          <portType name="P"><operation name="op">
            <input message="tns:nowhere"/>
          </operation></portType>
        </definitions>"""
        with pytest.raises(DanglingReferenceError) as err:
            parse_wsdl(doc)
        assert "nowhere" in str(err.value)

    def test_duplicate_operation(self):
        doc = """<definitions xmlns="http://schemas.xmlsoap.org/wsdl/" xmlns:tns="urn:t">
          <message name="m"><part name="x" type="xsd:string"/></message>
          <portType name="P">
            <operation name="op"><input message="tns:m"/></operation>
            <operation name="op"><input message="tns:m"/></operation>
          </portType>
        </definitions>"""
        with pytest.raises(DuplicateKeyError):
            parse_wsdl(doc)


class TestWarnings:
    def test_unknown_type_falls_back_to_string(self):
        doc = """<definitions xmlns="http://schemas.xmlsoap.org/wsdl/"
            xmlns:xsd="http://www.w3.org/2001/XMLSchema" xmlns:tns="urn:t">
          <message name="in"><part name="x" type="tns:Mystery"/></message>
          <message name="out"><part name="y" type="xsd:string"/></message>
          <portType name="P"><operation name="op">
            <input message="tns:in"/><output message="tns:out"/>
          </operation></portType>
        </definitions>"""
        warnings: list = []
        desc = parse_wsdl(doc, warnings)
        assert desc.operation("op").inputs[0].datatype == SimpleType("string")
        assert any("Mystery" in w for w in warnings)

    def test_import_and_missing_address_warn(self):
        doc = """<definitions xmlns="http://schemas.xmlsoap.org/wsdl/" xmlns:tns="urn:t">
          <import location="http://elsewhere.example/defs.wsdl" namespace="urn:x"/>
          <message name="m"><part name="x" type="xsd:string"/></message>
          <portType name="P"><operation name="op">
            <input message="tns:m"/><output message="tns:m"/>
          </operation></portType>
        </definitions>"""
        warnings: list = []
        desc = parse_wsdl(doc, warnings)
        assert desc.endpoint_address == ""
        assert any("import" in w for w in warnings)
        assert any("address" in w for w in warnings)

    def test_demo_corpus_parses_clean(self, demo_dir):
        for entry in sorted(p.name for p in (demo_dir / "wsdl").iterdir()):
            warnings: list = []
            desc = parse_wsdl((demo_dir / "wsdl" / entry).read_text(), warnings)
            assert desc.operations, entry
            assert desc.endpoint_address.startswith("https://"), entry
            assert warnings == [], entry
