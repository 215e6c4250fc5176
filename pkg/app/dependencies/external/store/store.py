"""
JSON Resolution Store

Saves resolutions computed by ``resolve --save NAME`` and loads them back for
``proj``, ``leading`` and ``twist-check``.

A document holds the ring declaration, the generators and every map as
canonical polynomial strings plus the degree marks. Loading rebuilds the
Schreyer frames from the initial terms of the columns; nothing in a loaded
document is trusted, and the commands re-verify the maps before use.
"""

import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.dependencies.internal.coeffring import ModuleFrame, RingSpec
from app.dependencies.internal.errors import DomainError, JobParseError
from app.dependencies.internal.poly import format_poly, parse_matrix, parse_poly, vec_initial
from app.dependencies.internal.resolution import FreeResolution, ResolutionStep
from app.dependencies.internal.stdbasis import standard_basis

from .settings import settings

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


# ============================================================================
# Document Models
# ============================================================================

class RingDocument(BaseModel):
    vars: list[str] = Field(..., min_length=1)
    center: int = Field(..., ge=1, description="Number of leading variables generating P")
    characteristic: int = Field(default=0, ge=0)


class StepDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    matrix: list[list[str]]
    col_marks: list[int] = Field(..., alias="colMarks")
    row_marks: list[int] = Field(..., alias="rowMarks")


class ResolutionDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schemaVersion")
    ring: RingDocument
    generators: list[str]
    steps: list[StepDocument]
    minimized: bool = False


# ============================================================================
# Conversion
# ============================================================================

def to_document(res: FreeResolution) -> ResolutionDocument:
    spec = res.spec
    return ResolutionDocument(
        ring=RingDocument(vars=list(spec.names), center=spec.center, characteristic=spec.characteristic),
        generators=[format_poly(g, spec) for g in res.generators],
        steps=[
            StepDocument(
                matrix=step.matrix.to_strings(spec),
                col_marks=list(step.col_marks),
                row_marks=list(step.row_marks),
            )
            for step in res.steps
        ],
        minimized=res.minimized,
    )


def _rebuild_frames(matrices, spec: RingSpec):
    frames = [ModuleFrame.for_ring(spec)]
    for matrix in matrices:
        initials = []
        for column in matrix.columns():
            k, m, _ = vec_initial(column, frames[-1], spec)
            initials.append((k, m))
        frames.append(frames[-1].extend(initials))
    return frames


def from_document(doc: ResolutionDocument) -> FreeResolution:
    spec = RingSpec(tuple(doc.ring.vars), doc.ring.center, doc.ring.characteristic)
    generators = tuple(parse_poly(g, spec) for g in doc.generators)
    matrices = []
    for step in doc.steps:
        matrix = parse_matrix(step.matrix, spec)
        if step.matrix and matrix.ncols != len(step.col_marks):
            raise JobParseError("stored marks do not match the stored matrix")
        matrices.append(matrix)

    frames = None
    if not doc.minimized:
        try:
            frames = _rebuild_frames(matrices, spec)
        except DomainError:
            logger.warning("stored resolution has a zero column; frames unavailable")

    steps = tuple(
        ResolutionStep(
            matrix,
            tuple(doc.steps[i].col_marks),
            tuple(doc.steps[i].row_marks),
            frames[i + 1] if frames else None,
            frames[i] if frames else None,
        )
        for i, matrix in enumerate(matrices)
    )
    basis = standard_basis(list(generators), spec)
    return FreeResolution(spec, generators, basis, steps, minimized=doc.minimized)


# ============================================================================
# Store
# ============================================================================

class ResolutionStore:
    """Directory of ``<name>.json`` resolution documents."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory if directory is not None else settings.store_dir)

    def path_for(self, name: str) -> Path:
        if name.endswith(".json"):
            return Path(name)
        return self.directory / f"{name}.json"

    def save(self, name: str, res: FreeResolution) -> Path:
        path = self.path_for(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(to_document(res).model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")
        logger.info("saved resolution to %s", path)
        return path

    def load(self, name: str) -> FreeResolution:
        path = self.path_for(name)
        if not path.exists():
            raise JobParseError(f"no stored resolution at {path}")
        try:
            doc = ResolutionDocument.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise JobParseError(f"malformed resolution document {path}: {exc.errors()[0]['msg']}")
        return from_document(doc)
