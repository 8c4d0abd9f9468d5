"""Exception types shared across the package.

Parsers raise; validators return findings. Anything raised here maps onto an
HTTP status in the API layer (see api.py).
"""
from __future__ import annotations


class TaskweaveError(Exception):
    """Base class for all package-specific errors."""


class ParseError(TaskweaveError):
    """Malformed input document (XML, JSON, lexicon)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DanglingReferenceError(TaskweaveError):
    """A document refers to an entity that is not declared."""

    def __init__(self, ref: str, context: str = ""):
        self.ref = ref
        suffix = f" in {context}" if context else ""
        super().__init__(f"unresolved reference {ref!r}{suffix}")


class DuplicateKeyError(TaskweaveError):
    def __init__(self, key: str, context: str = ""):
        self.key = key
        suffix = f" in {context}" if context else ""
        super().__init__(f"duplicate key {key!r}{suffix}")


class DataTypeError(TaskweaveError):
    """Invalid datatype declaration (unknown kind, empty complex, too deep)."""


class MissingDescriptionError(TaskweaveError):
    """A manifest service has no parsed WSDL description."""

    def __init__(self, service_key: str):
        self.service_key = service_key
        super().__init__(f"no service description for {service_key!r}")


class MissingSpecError(TaskweaveError):
    """A serviceTask node has no task specification."""

    def __init__(self, task_id: str):
        self.task_id = task_id
        super().__init__(f"no task spec for service task {task_id!r}")


class BadTargetError(TaskweaveError):
    """A task spec targets a node that is not a serviceTask."""

    def __init__(self, task_id: str):
        self.task_id = task_id
        super().__init__(f"spec target {task_id!r} is not a serviceTask")


class SpecValidationError(TaskweaveError):
    """Raised when annotations are applied despite validation errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors) or "invalid task specs")


class ContractError(TaskweaveError):
    """Mismatched artifacts passed together (e.g. bindings for another process)."""


class InvalidSlugError(TaskweaveError):
    def __init__(self, slug: str):
        self.slug = slug
        super().__init__(f"invalid project id {slug!r}: must match [a-z0-9-]{{1,64}}")


class NotFoundError(TaskweaveError):
    """Requested entity does not exist."""


class ConflictError(TaskweaveError):
    """A prerequisite artifact is missing for the requested operation."""

    def __init__(self, missing: str):
        self.missing = missing
        super().__init__(f"missing prerequisite: {missing}")
