"""Semantic service binding for annotated business processes.

Pipeline: parse a BPMN process and its task specs, build a service registry
from a UDDI-style manifest plus WSDLs and execution logs, check datatype
consistency between connected tasks, rank candidate operations by keyword
overlap, signature degree and QoS utility, then emit an executable process
with the chosen bindings.
"""
from .annotations import (
    AnnotatedProcess,
    SpecError,
    TaskSpec,
    apply_annotations,
    parse_task_specs,
    uniform_weights,
    validate_annotations,
)
from .bpmn import Edge, NodeKind, ProcessGraph, parse_bpmn
from .consistency import (
    InconsistencyReport,
    check_flows,
    compatible_type,
    is_consistent,
    widens_to,
)
from .emitter import (
    ExecutableProcess,
    Finding,
    ValidationReport,
    emit_executable,
    export_bponto,
    export_wsonto,
    validate_structure,
)
from .errors import (
    BadTargetError,
    ConflictError,
    ContractError,
    DanglingReferenceError,
    DataTypeError,
    DuplicateKeyError,
    InvalidSlugError,
    MissingDescriptionError,
    MissingSpecError,
    NotFoundError,
    ParseError,
    SpecValidationError,
    TaskweaveError,
)
from .matcher import (
    AttributeStats,
    BindingSet,
    CompositePlan,
    MatchCandidate,
    MatchDegree,
    TaskBinding,
    TaskMatch,
    bind_process_tasks,
    candidate_set,
    compose_chain,
    compute_stats,
    io_degree,
    keyword_score,
    match_task,
    rank_candidates,
    utility_score,
)
from .model import (
    DEFAULT_QOS_SCHEMA,
    ComplexType,
    Param,
    QoSAttribute,
    QoSRecord,
    QoSSchema,
    SimpleType,
)
from .registry import (
    RegistryManifest,
    ServiceRegistry,
    aggregate_qos,
    build_registry,
    parse_log_lines,
    parse_manifest,
    registry_from_json,
    registry_to_json,
)
from .textkit import (
    SynonymLexicon,
    extract_keywords,
    load_lexicon,
    names_match,
    normalize_name,
)
from .wsdl import OperationSig, ServiceDescription, parse_wsdl

__version__ = "1.0.0"

__all__ = [
    "AnnotatedProcess",
    "AttributeStats",
    "BadTargetError",
    "BindingSet",
    "ComplexType",
    "CompositePlan",
    "ConflictError",
    "ContractError",
    "DanglingReferenceError",
    "DataTypeError",
    "DEFAULT_QOS_SCHEMA",
    "DuplicateKeyError",
    "Edge",
    "ExecutableProcess",
    "Finding",
    "InconsistencyReport",
    "InvalidSlugError",
    "MatchCandidate",
    "MatchDegree",
    "MissingDescriptionError",
    "MissingSpecError",
    "NodeKind",
    "NotFoundError",
    "OperationSig",
    "Param",
    "ParseError",
    "ProcessGraph",
    "QoSAttribute",
    "QoSRecord",
    "QoSSchema",
    "RegistryManifest",
    "ServiceDescription",
    "ServiceRegistry",
    "SimpleType",
    "SpecError",
    "SpecValidationError",
    "SynonymLexicon",
    "TaskBinding",
    "TaskMatch",
    "TaskSpec",
    "TaskweaveError",
    "ValidationReport",
    "aggregate_qos",
    "apply_annotations",
    "bind_process_tasks",
    "build_registry",
    "candidate_set",
    "check_flows",
    "compatible_type",
    "compose_chain",
    "compute_stats",
    "emit_executable",
    "export_bponto",
    "export_wsonto",
    "extract_keywords",
    "io_degree",
    "is_consistent",
    "keyword_score",
    "load_lexicon",
    "match_task",
    "names_match",
    "normalize_name",
    "parse_bpmn",
    "parse_log_lines",
    "parse_manifest",
    "parse_task_specs",
    "parse_wsdl",
    "rank_candidates",
    "registry_from_json",
    "registry_to_json",
    "uniform_weights",
    "utility_score",
    "validate_annotations",
    "validate_structure",
    "widens_to",
]
