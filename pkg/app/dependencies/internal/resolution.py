"""
Schreyer Resolutions

Free resolutions 0 -> R^{m_k} -> ... -> R^{m_0} -> R of R/I over k[x]_m with
P-order degree marks, leading complexes, minimization, and the twisted
exactness certificate.

Indexing conventions used throughout:

- ``steps[i]`` is the map F_i : G_{i+1} -> G_i, with G_0 = R and
  G_{i+1} = R^{m_i}.
- Rows of F_i carry the target marks a^{(i-1)} (a^{(-1)} = (0,)), columns
  carry the source marks a^{(i)}, and every entry e in row m, column n
  satisfies ord_P(e) >= colMarks[n] - rowMarks[m].
- Each G_p has a ModuleFrame; the columns of F_i form a standard basis of
  their span with respect to the frame of G_i.

Note: Termination
-----------------
At level L the new basis is sorted within each component by descending
exponent of variable number (L mod n). Syzygy initials of the next level
then avoid that variable, so the construction stops after at most n + 1 maps.
"""

from dataclasses import dataclass, field, replace
import logging
from typing import Sequence

from sympy.polys.monomials import monomial_div, monomial_lcm

from app.dependencies.external.store.settings import settings

from .coeffring import Monomial, ModuleFrame, RingSpec
from .errors import (
    DimensionError,
    InternalInconsistencyError,
    PreconditionError,
)
from .linalg import (
    graded_basis,
    graded_map,
    monomials_of_degree,
    oracle_rank,
    p_monomials,
    rank,
    solve,
)
from .localdiv import mora_divide_vector
from .poly import (
    Poly,
    PolyMatrix,
    Vec,
    divides,
    leading_form_p,
    ord_p,
    p_part,
    unit_vec,
    vec_initial,
    vec_is_zero,
    vec_mul_term,
    vec_ord_p,
    vec_scale,
    vec_sub,
    zero_vec,
)
from .stdbasis import StandardBasis, s_vector, standard_basis

logger = logging.getLogger(__name__)


# ============================================================================
# Data Types
# ============================================================================

@dataclass(frozen=True)
class ResolutionStep:
    matrix: PolyMatrix
    col_marks: tuple[int, ...]
    row_marks: tuple[int, ...]
    source_frame: ModuleFrame | None = None
    target_frame: ModuleFrame | None = None


@dataclass(frozen=True)
class FreeResolution:
    spec: RingSpec
    generators: tuple[Poly, ...]
    basis: StandardBasis | None
    steps: tuple[ResolutionStep, ...]
    minimized: bool = False

    @property
    def length(self) -> int:
        """Index k of the last map F_k."""
        return len(self.steps) - 1

    @property
    def ranks(self) -> tuple[int, ...]:
        return (1,) + tuple(step.matrix.ncols for step in self.steps)

    def module_rank(self, p: int) -> int:
        if p < 0 or p > len(self.steps):
            return 0
        return self.ranks[p]

    def marks(self, p: int) -> tuple[int, ...]:
        """Degree marks of the basis of G_p (G_0 = R has mark 0)."""
        if p == 0:
            return (0,)
        if 1 <= p <= len(self.steps):
            return self.steps[p - 1].col_marks
        return ()

    def frame(self, p: int) -> ModuleFrame:
        if self.minimized:
            raise PreconditionError("minimized resolutions carry no Schreyer frames")
        if p == 0:
            return self.steps[0].target_frame
        return self.steps[p - 1].source_frame

    def differential(self, p: int) -> PolyMatrix:
        """D_p = F_{p-1} : G_p -> G_{p-1}; zero outside the resolution."""
        if 1 <= p <= len(self.steps):
            return self.steps[p - 1].matrix
        return PolyMatrix.zeros(self.spec, self.module_rank(p - 1), self.module_rank(p))


@dataclass(frozen=True)
class LiftOutcome:
    success: bool
    vector: Vec
    iterations: int
    failure_degree: int | None = None


@dataclass(frozen=True)
class LiftCheck:
    kind: str
    success: bool
    iterations: int


@dataclass(frozen=True)
class PositionReport:
    level: int
    lifts: tuple[LiftCheck, ...]
    ranks: dict[int, tuple[int, int]]
    exact: bool


@dataclass(frozen=True)
class TwistReport:
    r: int
    cap: int
    positions: tuple[PositionReport, ...]
    success: bool
    oracle: dict = field(default_factory=dict)


# ============================================================================
# Schreyer Syzygies
# ============================================================================

def _sort_columns(items, variable: int):
    return sorted(items, key=lambda item: (item[0], -item[1][variable]))


def schreyer_syzygy(step: ResolutionStep, spec: RingSpec, level: int) -> ResolutionStep | None:
    """
    Syzygies of the columns of ``step`` (a standard basis in the frame of its
    target), returned as the next map F_level, or None when there are none.
    """
    columns = step.matrix.columns()
    target = step.target_frame
    source = step.source_frame
    initials = [vec_initial(col, target, spec) for col in columns]

    candidates = []
    for a in range(len(columns)):
        for b in range(a + 1, len(columns)):
            if initials[a][0] != initials[b][0]:
                continue
            s, (pa, pb) = s_vector(columns[a], columns[b], target, spec)
            result = mora_divide_vector(s, columns, target, spec)
            if not vec_is_zero(result.remainder):
                raise InternalInconsistencyError(
                    f"columns of F_{level - 1} are not a standard basis", pair=[a, b]
                )
            coeffs = [-q for q in result.quotients]
            coeffs[a] += result.unit * pa
            coeffs[b] += result.unit * pb
            syzygy = tuple(coeffs)
            k, m, c = vec_initial(syzygy, source, spec)
            expected = monomial_div(monomial_lcm(initials[a][1], initials[b][1]), initials[a][1])
            if (k, m) != (a, expected):
                raise InternalInconsistencyError(
                    "syzygy initial term differs from the Schreyer prediction", pair=[a, b]
                )
            candidates.append((a, m, tuple(x.quo_ground(c) for x in syzygy)))

    kept = []
    for idx, (a, m, syz) in enumerate(candidates):
        redundant = any(
            other_a == a and divides(other_m, m) and (other_m != m or other_idx < idx)
            for other_idx, (other_a, other_m, _) in enumerate(candidates)
            if other_idx != idx
        )
        if not redundant:
            kept.append((a, m, syz))
    if not kept:
        return None

    kept = _sort_columns(kept, level % spec.n)
    new_frame = source.extend([(a, m) for a, m, _ in kept])
    matrix = PolyMatrix.from_columns(spec, [syz for _, _, syz in kept], nrows=len(columns))
    logger.info("level %d: %d syzygies from %d pairs", level, len(kept), len(candidates))
    return ResolutionStep(matrix, new_frame.marks(spec), step.col_marks, new_frame, source)


def free_resolution(gens: Sequence[Poly], spec: RingSpec, *, reduce: bool = False) -> FreeResolution:
    """Schreyer resolution of R/I with degree marks at every level."""
    basis = standard_basis(gens, spec)
    elements = sorted(
        basis.elements, key=lambda g: -vec_initial((g,), ModuleFrame.for_ring(spec), spec)[1][0]
    )
    ring_frame = ModuleFrame.for_ring(spec)
    source = ring_frame.extend([(0, vec_initial((g,), ring_frame, spec)[1]) for g in elements])
    first = ResolutionStep(
        PolyMatrix.from_rows(spec, [elements]),
        source.marks(spec),
        (0,),
        source,
        ring_frame,
    )
    steps = [first]
    while True:
        nxt = schreyer_syzygy(steps[-1], spec, len(steps))
        if nxt is None:
            break
        steps.append(nxt)
        if len(steps) > spec.n + 1:
            raise InternalInconsistencyError("resolution longer than the number of variables")
    resolution = FreeResolution(spec, basis.generators, basis, tuple(steps))
    if settings.check_identities and not composites_vanish(resolution):
        raise InternalInconsistencyError("consecutive resolution maps do not compose to zero")
    if reduce:
        resolution = minimize_resolution(resolution)
    return resolution


# ============================================================================
# Invariant Checks
# ============================================================================

def composites_vanish(res: FreeResolution) -> bool:
    return all((a.matrix @ b.matrix).is_zero() for a, b in zip(res.steps, res.steps[1:]))


def degree_compatible(res: FreeResolution) -> bool:
    for step in res.steps:
        for m, n, e in step.matrix.entries():
            if e and ord_p(e, res.spec) < step.col_marks[n] - step.row_marks[m]:
                return False
    return True


def columns_are_standard(res: FreeResolution) -> bool:
    """Every S-vector of same-component columns reduces to zero."""
    if res.minimized:
        return True
    for step in res.steps:
        columns = step.matrix.columns()
        for a in range(len(columns)):
            for b in range(a + 1, len(columns)):
                s, _ = s_vector(columns[a], columns[b], step.target_frame, res.spec)
                if vec_is_zero(s):
                    continue
                result = mora_divide_vector(s, columns, step.target_frame, res.spec)
                if not vec_is_zero(result.remainder):
                    return False
    return True


# ============================================================================
# Leading Complex and Minimization
# ============================================================================

def leading_matrix(step: ResolutionStep, spec: RingSpec) -> PolyMatrix:
    return step.matrix.map_entries(
        lambda m, n, e: p_part(e, spec, step.col_marks[n] - step.row_marks[m]) if e else e
    )


def leading_complex(res: FreeResolution) -> FreeResolution:
    """Same shape and marks; every entry cut to its part of the prescribed P-order."""
    steps = tuple(replace(step, matrix=leading_matrix(step, res.spec)) for step in res.steps)
    return replace(res, steps=steps)


def leading_consistency(res: FreeResolution) -> tuple[bool, FreeResolution]:
    """Compare the leading complex with the resolution of the leading forms."""
    leading_gens = [leading_form_p(g, res.spec)[0] for g in res.basis.elements]
    other = free_resolution(leading_gens, res.spec)
    same = other.ranks == res.ranks and all(
        other.marks(p) == res.marks(p) for p in range(len(res.steps) + 1)
    )
    return same, other


def minimize_resolution(res: FreeResolution) -> FreeResolution:
    """
    Prune rows and columns at nonzero constant entries of F_1, ..., F_k by
    the rank-one update F' = F - col * row / pivot. Graded homotopy data
    does not survive this operation.
    """
    spec = res.spec
    mats = [[list(r) for r in step.matrix.rows] for step in res.steps]
    shapes = [(step.matrix.nrows, step.matrix.ncols) for step in res.steps]
    marks = [list(step.col_marks) for step in res.steps]

    def find_pivot():
        for i in range(1, len(mats)):
            for m in range(shapes[i][0]):
                for n in range(shapes[i][1]):
                    e = mats[i][m][n]
                    if e and e.is_ground:
                        return i, m, n
        return None

    while (pivot := find_pivot()) is not None:
        i, m, n = pivot
        a = mats[i][m][n]
        rows, cols = shapes[i]
        updated = [
            [
                mats[i][r][s] - mats[i][r][n] * mats[i][m][s].quo_ground(a.LC)
                for s in range(cols)
                if s != n
            ]
            for r in range(rows)
            if r != m
        ]
        mats[i] = updated
        shapes[i] = (rows - 1, cols - 1)
        mats[i - 1] = [[e for s, e in enumerate(row) if s != m] for row in mats[i - 1]]
        shapes[i - 1] = (shapes[i - 1][0], shapes[i - 1][1] - 1)
        marks[i - 1] = [v for s, v in enumerate(marks[i - 1]) if s != m]
        marks[i] = [v for s, v in enumerate(marks[i]) if s != n]
        if i + 1 < len(mats):
            mats[i + 1] = [row for r, row in enumerate(mats[i + 1]) if r != n]
            shapes[i + 1] = (shapes[i + 1][0] - 1, shapes[i + 1][1])
        logger.debug("pruned unit entry of F_%d at (%d, %d)", i, m, n)

    while len(mats) > 1 and shapes[-1][1] == 0:
        mats.pop()
        shapes.pop()
        marks.pop()

    steps = []
    for i, (body, (rows, cols)) in enumerate(zip(mats, shapes)):
        row_marks = (0,) if i == 0 else tuple(marks[i - 1])
        steps.append(
            ResolutionStep(
                PolyMatrix.from_rows(spec, body, ncols=cols) if rows else PolyMatrix.zeros(spec, 0, cols),
                tuple(marks[i]),
                row_marks,
            )
        )
    logger.warning("minimized resolution: graded homotopy data is not preserved")
    return FreeResolution(spec, res.generators, res.basis, tuple(steps), minimized=True)


# ============================================================================
# Twisted Exactness
# ============================================================================

def _nonp_degree(v: Vec, c: int) -> int:
    return max((sum(m[c:]) for a in v for m in a.keys()), default=0)


def _graded_solve(
    leading: PolyMatrix,
    src_marks: Sequence[int],
    part: Vec,
    degree: int,
    spec: RingSpec,
) -> Vec | None:
    """Solve leading * s = part with s homogeneous of P-degree ``degree``."""
    c = spec.c
    cap = _nonp_degree(part, c) + max(
        (sum(m[c:]) for _, _, e in leading.entries() for m in e.keys()), default=0
    )
    unknowns = [(j, mu) for j, mark in enumerate(src_marks) for mu in p_monomials(spec, degree - mark, cap)]
    equations: dict[tuple[int, Monomial], dict[int, object]] = {}
    for u, (j, mu) in enumerate(unknowns):
        for row in range(leading.nrows):
            entry = leading[row, j]
            if not entry:
                continue
            product = entry.mul_monom(mu)
            for monom, coeff in product.items():
                equations.setdefault((row, monom), {})
                equations[(row, monom)][u] = equations[(row, monom)].get(u, spec.domain.zero) + coeff
    rhs_terms = {(row, monom): coeff for row, a in enumerate(part) for monom, coeff in a.items()}
    keys = sorted(set(equations) | set(rhs_terms))
    rows = [[equations.get(key, {}).get(u, spec.domain.zero) for u in range(len(unknowns))] for key in keys]
    rhs = [rhs_terms.get(key, spec.domain.zero) for key in keys]
    solution = solve(rows, rhs, spec.domain, len(unknowns))
    if solution is None:
        return None
    s = list(zero_vec(spec, len(src_marks)))
    for value, (j, mu) in zip(solution, unknowns):
        if value:
            s[j] += spec.ring({mu: value})
    return tuple(s)


def twist_lift(res: FreeResolution, level: int, t: Vec, r: int) -> LiftOutcome:
    """
    Given t in G_{level+1} with F_level(t) in the twisted target, return
    t_inf in the twisted source with the same image, correcting degree by
    degree with graded solves against the leading complex.
    """
    spec = res.spec
    if not 0 <= level <= res.length:
        raise DimensionError(f"level {level} outside 0..{res.length}")
    step = res.steps[level]
    if len(t) != step.matrix.ncols:
        raise DimensionError(f"vector of rank {len(t)} does not fit F_{level}")
    image = step.matrix.apply(t)
    if vec_ord_p(image, step.row_marks, spec) < r:
        raise PreconditionError(f"F_{level}(t) does not lie in the twisted target for r={r}")

    nxt = res.steps[level + 1] if level + 1 <= res.length else None
    lead_next = leading_matrix(nxt, spec) if nxt is not None else None
    current = t
    iterations = 0
    while True:
        delta = vec_ord_p(current, step.col_marks, spec)
        if delta >= r:
            return LiftOutcome(True, current, iterations)
        part = tuple(p_part(a, spec, delta - step.col_marks[l]) for l, a in enumerate(current))
        if lead_next is None:
            return LiftOutcome(False, current, iterations, int(delta))
        s = _graded_solve(lead_next, nxt.col_marks, part, int(delta), spec)
        if s is None:
            return LiftOutcome(False, current, iterations, int(delta))
        current = vec_sub(current, nxt.matrix.apply(s))
        iterations += 1


def _lift_tests(res: FreeResolution, level: int, r: int, cap: int) -> list[tuple[str, Vec]]:
    spec = res.spec
    step = res.steps[level]
    rank_src = step.matrix.ncols
    trivial = []
    for l, mark in enumerate(step.col_marks):
        for mu in p_monomials(spec, max(r - mark, 0)):
            trivial.append(("in_twist", vec_mul_term(unit_vec(spec, rank_src, l), mu, spec.domain.one)))
    tests = list(trivial)
    if level + 1 <= res.length:
        nxt = res.steps[level + 1]
        for j, mark in enumerate(nxt.col_marks):
            column = nxt.matrix.column(j)
            for order in range(max(0, r - mark - 2), cap + 1):
                for nu in p_monomials(spec, order):
                    kernel = vec_scale(column, spec.ring({nu: spec.domain.one}))
                    tests.append(("kernel_below_twist" if order + mark < r else "kernel", kernel))
                    if trivial:
                        mixed = tuple(a + b for a, b in zip(trivial[0][1], kernel))
                        tests.append(("mixed", mixed))
    return tests


def _graded_ranks(leading: FreeResolution, level: int, degree: int, use_oracle: bool):
    spec = leading.spec

    def piece_rank(step) -> int:
        if use_oracle:
            return oracle_rank(step.matrix, step.col_marks, step.row_marks, degree, spec)
        return rank(graded_map(step.matrix, step.col_marks, step.row_marks, degree, spec)[0])

    step = leading.steps[level]
    dim_src = len(graded_basis(spec, step.col_marks, degree))
    dim_ker = dim_src - piece_rank(step)
    dim_im = piece_rank(leading.steps[level + 1]) if level + 1 <= leading.length else 0
    return dim_ker, dim_im


def euler_check(res: FreeResolution, cap: int) -> dict[int, bool] | None:
    """
    Alternating sum of graded dimensions of the terms against the number of
    standard monomials of R/in(I), degree by degree (only when c = n).
    """
    spec = res.spec
    if spec.c != spec.n or res.basis is None:
        return None
    initials = [vec_initial((g,), ModuleFrame.for_ring(spec), spec)[1] for g in res.basis.elements]
    verdicts = {}
    for d in range(cap + 1):
        alternating = 0
        for p in range(len(res.steps) + 1):
            dims = sum(len(monomials_of_degree(spec.n, d - mark)) for mark in res.marks(p))
            alternating += (-1) ** p * dims
        standard = sum(
            1 for m in monomials_of_degree(spec.n, d) if not any(divides(i, m) for i in initials)
        )
        verdicts[d] = alternating == standard
    return verdicts


def twist_exactness_check(res: FreeResolution, r: int, cap: int, *, oracle: bool = False) -> TwistReport:
    """Lift tests at every level plus degreewise exactness of the leading complex."""
    if res.minimized:
        raise PreconditionError("twist checks need the Schreyer resolution, not a minimized one")
    leading = leading_complex(res)
    positions = []
    for level in range(res.length + 1):
        checks = []
        image_of = res.steps[level].matrix
        for kind, t in _lift_tests(res, level, r, cap):
            outcome = twist_lift(res, level, t, r)
            ok = (
                outcome.success
                and image_of.apply(outcome.vector) == image_of.apply(t)
                and vec_ord_p(outcome.vector, res.steps[level].col_marks, res.spec) >= r
            )
            checks.append(LiftCheck(kind, ok, outcome.iterations))
        table = {}
        for d in range(max(r, 0), cap + 1):
            table[d] = _graded_ranks(leading, level, d, use_oracle=False)
        exact = all(ker == im for ker, im in table.values()) and all(c.success for c in checks)
        positions.append(PositionReport(level, tuple(checks), table, exact))

    oracle_section: dict = {}
    if oracle:
        if res.spec.characteristic:
            oracle_section = {"applicable": False, "reason": "oracle ranks are computed over Q"}
        else:
            agree = True
            for position in positions:
                for d, expected in position.ranks.items():
                    if _graded_ranks(leading, position.level, d, use_oracle=True) != expected:
                        agree = False
            euler = euler_check(res, cap)
            oracle_section = {
                "applicable": True,
                "rank_agreement": agree,
                "euler": None if euler is None else all(euler.values()),
            }
    success = all(p.exact for p in positions)
    logger.info("twist check r=%d cap=%d: %s", r, cap, "pass" if success else "fail")
    return TwistReport(r, cap, tuple(positions), success, oracle_section)


def graded_dimensions(res: FreeResolution, degree: int) -> list[int]:
    return [len(graded_basis(res.spec, res.marks(p), degree)) for p in range(len(res.steps) + 1)]


__all__ = [
    "FreeResolution",
    "LiftOutcome",
    "ResolutionStep",
    "TwistReport",
    "columns_are_standard",
    "composites_vanish",
    "degree_compatible",
    "euler_check",
    "free_resolution",
    "leading_complex",
    "leading_consistency",
    "leading_matrix",
    "minimize_resolution",
    "schreyer_syzygy",
    "twist_exactness_check",
    "twist_lift",
]
