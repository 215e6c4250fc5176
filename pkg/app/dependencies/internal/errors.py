"""
Engine Errors

Every failure the algebra engine can report is a subclass of LocalResError.
Each class carries a machine-readable ``code`` (echoed in JSON reports and
HTTP error bodies) and the process ``exit_code`` the CLI terminates with.
"""

from typing import Any


class LocalResError(Exception):
    """Base class for all engine errors."""

    code: str = "error"
    exit_code: int = 2

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        body: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.details:
            body["details"] = self.details
        return body


class DimensionError(LocalResError):
    """Exponent vectors, vectors or matrices of incompatible sizes."""

    code = "dimension"


class DomainError(LocalResError):
    """An operation received a value outside its domain (e.g. the zero polynomial)."""

    code = "domain"


class PreconditionError(LocalResError):
    code = "precondition"


class InsufficientLengthError(LocalResError):
    code = "insufficient_length"


class UnsupportedError(LocalResError):
    code = "unsupported"


class JobParseError(LocalResError):
    """Syntax or reference error in a job file, with a 1-based source position."""

    code = "parse"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}", line=line, column=column)
        self.line = line
        self.column = column


class ResourceCeilingError(LocalResError):
    """A reduction or pair-processing ceiling from EngineSettings was exceeded."""

    code = "resource_ceiling"
    exit_code = 3


class InternalInconsistencyError(LocalResError):
    """An identity that must hold exactly did not (signals a bug, not bad input)."""

    code = "internal_inconsistency"
    exit_code = 1


class UnitDenominatorError(LocalResError):
    """A homotopy solve produced a non-constant unit that does not divide the quotients."""

    code = "unit_denominator"
    exit_code = 1
