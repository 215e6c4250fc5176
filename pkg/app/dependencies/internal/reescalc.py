"""
Blow-up bookkeeping.

Numeric shadows of the blow-up side: Serre twists read off resolution marks,
the relative Gorenstein parameter and its exceptional pieces, and threshold
splits of graded complexes. No sheaf cohomology is computed here.
"""

from collections import Counter
from dataclasses import dataclass
from math import comb

from .errors import PreconditionError
from .poly import is_unit
from .resolution import FreeResolution

RESIDUAL_LABEL = "pullback_image"


@dataclass(frozen=True)
class ProjPosition:
    index: int
    twists: tuple[tuple[int, int], ...]
    serre_twists: tuple[int, ...]


@dataclass(frozen=True)
class ProjComplexDescriptor:
    head_twist: int
    positions: tuple[ProjPosition, ...]
    source_marks: tuple[tuple[int, ...], ...]


def proj_complex(res: FreeResolution) -> ProjComplexDescriptor:
    """
    Position i lists (twist multiple of E, multiplicity) for the marks of
    G_{i+1}; the equivalent Serre twist of O(a E) is -a.
    """
    first = res.steps[0].matrix
    if any(is_unit(e) for _, _, e in first.entries()):
        raise PreconditionError("the unit ideal has no blow-up resolution")
    positions = []
    marks = []
    for i, step in enumerate(res.steps):
        counts = Counter(step.col_marks)
        twists = tuple(sorted(counts.items()))
        positions.append(ProjPosition(i, twists, tuple(-t for t, _ in twists)))
        marks.append(step.col_marks)
    return ProjComplexDescriptor(0, tuple(positions), tuple(marks))


@dataclass(frozen=True)
class SodReport:
    n: int
    c: int
    d: int
    gorenstein_parameter: int
    applicable: bool
    pieces: tuple[int, ...]
    residual_label: str

    @property
    def piece_labels(self) -> list[str]:
        return [f"O_E({t})" for t in self.pieces]


def sod_report(n: int, c: int, d: int) -> SodReport:
    """Exceptional twists -(c-d)+1, ..., -1 when c - d > 0."""
    if not 1 <= c <= n:
        raise PreconditionError(f"need 1 <= c <= n, got c={c}, n={n}")
    if d < 1:
        raise PreconditionError(f"need d >= 1, got d={d}")
    parameter = c - d
    applicable = parameter > 0
    pieces = tuple(range(-parameter + 1, 0)) if applicable else ()
    return SodReport(n, c, d, parameter, applicable, pieces, RESIDUAL_LABEL)


@dataclass(frozen=True)
class GradedComplex:
    positions: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class TruncationSplit:
    k: int
    floor: tuple[tuple[int, ...], ...]
    ceiling: tuple[tuple[int, ...], ...]

    def partitions(self, gc: GradedComplex) -> bool:
        return all(
            Counter(lo) + Counter(hi) == Counter(orig)
            for lo, hi, orig in zip(self.floor, self.ceiling, gc.positions)
        ) and len(self.floor) == len(gc.positions)


def graded_truncate(gc: GradedComplex, k: int) -> TruncationSplit:
    """Floor keeps shifts <= k, ceiling keeps the rest, position by position."""
    floor = tuple(tuple(s for s in shifts if s <= k) for shifts in gc.positions)
    ceiling = tuple(tuple(s for s in shifts if s > k) for shifts in gc.positions)
    return TruncationSplit(k, floor, ceiling)


def koszul_graded_complex(c: int) -> GradedComplex:
    if c < 1:
        raise PreconditionError("the center needs at least one generator")
    return GradedComplex(tuple((j,) * comb(c, j) for j in range(c + 1)))


def graded_complex_from_resolution(res: FreeResolution) -> GradedComplex:
    return GradedComplex((res.marks(0),) + tuple(step.col_marks for step in res.steps))


__all__ = [
    "GradedComplex",
    "ProjComplexDescriptor",
    "RESIDUAL_LABEL",
    "SodReport",
    "TruncationSplit",
    "graded_complex_from_resolution",
    "graded_truncate",
    "koszul_graded_complex",
    "proj_complex",
    "sod_report",
]
