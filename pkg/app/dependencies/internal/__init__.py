"""
Algebra engine.

    from app.dependencies.internal import parse_job, run_job

The submodules build on one another bottom-up: coefficient rings and
orderings, polynomials and matrices, Mora division, standard bases,
resolutions, homotopies and matrix factorizations, periodicity, blow-up
bookkeeping, and finally the job runner.
"""

from .coeffring import ModuleFrame, RingSpec
from .errors import (
    DimensionError,
    DomainError,
    InsufficientLengthError,
    InternalInconsistencyError,
    JobParseError,
    LocalResError,
    PreconditionError,
    ResourceCeilingError,
    UnitDenominatorError,
    UnsupportedError,
)
from .jobs import COMMANDS, JobSpec, ReportDocument, parse_job, reports_to_json, run_all, run_job

__all__ = [
    "COMMANDS",
    "DimensionError",
    "DomainError",
    "InsufficientLengthError",
    "InternalInconsistencyError",
    "JobParseError",
    "JobSpec",
    "LocalResError",
    "ModuleFrame",
    "PreconditionError",
    "ReportDocument",
    "ResourceCeilingError",
    "RingSpec",
    "UnitDenominatorError",
    "UnsupportedError",
    "parse_job",
    "reports_to_json",
    "run_all",
    "run_job",
]
