"""
Hypersurface and Complete-Intersection Homotopies

Given a resolution G_* -> R/I with differentials D_p = F_{p-1} : G_p -> G_{p-1}
and elements w_1, ..., w_s of I (s = 1 or 2), a homotopy system is a family of
maps

    sigma_alpha^{(p)} : G_p -> G_{p + 2|alpha| - 1},   alpha in N^s \\ {0},

with sigma_0 = D and, for every alpha and p,

    sum_{beta + gamma = alpha} sigma_beta sigma_gamma = w_j * id  if alpha = e_j,
                                                       0          otherwise.

For a hypersurface (s = 1) the chain homotopies are K_i = sigma_(1)^{(i)} and
the higher homotopies are K_i^{(a)} = sigma_(a+1)^{(i)}. For two elements the
chains are K = sigma_(1,0), L = sigma_(0,1) and the connecting maps are
G = sigma_(1,1).

Maps are stored unsigned; signs are introduced only when a totalization is
assembled with ``signed=True``.
"""

from dataclasses import dataclass, field, replace
from itertools import product
import logging
from typing import Sequence

from sympy.polys.matrices import DomainMatrix

from app.dependencies.external.store.settings import settings

from .coeffring import ModuleFrame, RingSpec
from .errors import (
    InsufficientLengthError,
    InternalInconsistencyError,
    PreconditionError,
    UnitDenominatorError,
)
from .linalg import monomials_of_degree, rank
from .localdiv import mora_divide_vector
from .poly import (
    Poly,
    PolyMatrix,
    block_matrix,
    constant_term,
    divides,
    exact_quotient,
    is_homogeneous,
    leading_form_p,
    ord_m,
    ord_p,
    p_part,
    vec_initial,
    vec_is_zero,
)
from .resolution import FreeResolution, leading_complex
from .stdbasis import StandardBasis, ideal_member, normal_form, standard_basis

logger = logging.getLogger(__name__)

MultiIndex = tuple[int, ...]


# ============================================================================
# Homotopy Systems
# ============================================================================

@dataclass(frozen=True)
class HomotopySystem:
    """
    Homotopies over a resolution, keyed by (multi-index, source position).

    Only maps whose target G_q is nonzero are stored; everything else is zero.
    ``depth_cap`` bounds |alpha| - 1 for the computed maps.
    """

    resolution: FreeResolution
    ws: tuple[Poly, ...]
    maps: dict[tuple[MultiIndex, int], PolyMatrix]
    depth_cap: int
    leading: bool = False

    @property
    def spec(self) -> RingSpec:
        return self.resolution.spec

    @property
    def s(self) -> int:
        return len(self.ws)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(int(ord_p(w, self.spec)) for w in self.ws)

    @property
    def top(self) -> int:
        """Largest position p with G_p nonzero."""
        return len(self.resolution.steps)

    def sigma(self, alpha: MultiIndex, p: int) -> PolyMatrix:
        res = self.resolution
        if not any(alpha):
            return res.differential(p)
        q = p + 2 * sum(alpha) - 1
        stored = self.maps.get((alpha, p))
        if stored is not None:
            return stored
        return PolyMatrix.zeros(self.spec, res.module_rank(q), res.module_rank(p))

    def K(self, i: int, a: int = 0) -> PolyMatrix:
        if self.s == 1:
            return self.sigma((a + 1,), i)
        return self.sigma((a + 1, 0), i)

    def L(self, i: int) -> PolyMatrix:
        return self.sigma((0, 1), i)

    def G(self, i: int) -> PolyMatrix:
        return self.sigma((1, 1), i)

    def target_position(self, alpha: MultiIndex, p: int) -> int:
        return p + 2 * sum(alpha) - 1

    def multi_indices(self, depth: int | None = None) -> list[MultiIndex]:
        cap = self.depth_cap if depth is None else depth
        return multi_indices(self.s, cap + 1)


def multi_indices(s: int, max_size: int) -> list[MultiIndex]:
    """Nonzero alpha in N^s with |alpha| <= max_size, ordered by (|alpha|, alpha_s, ..., alpha_1)."""
    found = [
        alpha
        for alpha in product(range(max_size + 1), repeat=s)
        if 0 < sum(alpha) <= max_size
    ]
    return sorted(found, key=lambda alpha: (sum(alpha), tuple(reversed(alpha))))


def _splittings(alpha: MultiIndex):
    """Pairs (beta, gamma) of nonzero multi-indices with beta + gamma = alpha."""
    for beta in product(*(range(a + 1) for a in alpha)):
        gamma = tuple(a - b for a, b in zip(alpha, beta))
        if any(beta) and any(gamma):
            yield beta, gamma


def _delta(alpha: MultiIndex, ws: Sequence[Poly], spec: RingSpec) -> Poly:
    if sum(alpha) == 1:
        return ws[alpha.index(1)]
    return spec.ring.zero


def relation_residual(system: HomotopySystem, alpha: MultiIndex, p: int) -> PolyMatrix:
    """
    D sigma_alpha^{(p)} + sigma_alpha^{(p-1)} D + sum of split products
    minus delta * id, as a map G_p -> G_{p + 2|alpha| - 2}.
    """
    spec = system.spec
    res = system.resolution
    q = system.target_position(alpha, p)
    total = _inhomogeneous_part(system, alpha, p)
    total = total + res.differential(q) @ system.sigma(alpha, p)
    if q - 1 == p:
        total = total - PolyMatrix.identity(spec, res.module_rank(p), _delta(alpha, system.ws, spec))
    return total


def _inhomogeneous_part(system: HomotopySystem, alpha: MultiIndex, p: int) -> PolyMatrix:
    """sigma_alpha^{(p-1)} D_p + sum_{beta+gamma=alpha} sigma_beta sigma_gamma^{(p)}."""
    spec = system.spec
    res = system.resolution
    q = system.target_position(alpha, p)
    total = PolyMatrix.zeros(spec, res.module_rank(q - 1), res.module_rank(p))
    if p >= 1:
        total = total + system.sigma(alpha, p - 1) @ res.differential(p)
    for beta, gamma in _splittings(alpha):
        mid = system.target_position(gamma, p)
        total = total + system.sigma(beta, mid) @ system.sigma(gamma, p)
    return total


def _solve_columns(
    rhs: PolyMatrix,
    divisor: PolyMatrix,
    frame: ModuleFrame,
    spec: RingSpec,
    label: str,
) -> PolyMatrix:
    """Columnwise solution X of divisor @ X = rhs through Mora division."""
    divisors = divisor.columns()
    solved = []
    for j, column in enumerate(rhs.columns()):
        if vec_is_zero(column):
            solved.append(tuple(spec.ring.zero for _ in divisors))
            continue
        result = mora_divide_vector(column, divisors, frame, spec)
        if not vec_is_zero(result.remainder):
            raise InternalInconsistencyError(
                f"{label}: column {j} does not lie in the image of the differential"
            )
        unit = result.unit
        if unit == spec.ring.one:
            solved.append(result.quotients)
            continue
        logger.warning("%s: clearing unit multiplier on column %d", label, j)
        cleared = []
        for q in result.quotients:
            exact = exact_quotient(q, unit)
            if exact is None:
                raise UnitDenominatorError(
                    f"{label}: column {j} needs a non-polynomial unit denominator"
                )
            cleared.append(exact)
        solved.append(tuple(cleared))
    return PolyMatrix.from_columns(spec, solved, nrows=len(divisors))


def _complete(system: HomotopySystem, depth_cap: int) -> HomotopySystem:
    res = system.resolution
    spec = system.spec
    maps = dict(system.maps)
    working = replace(system, maps=maps, depth_cap=depth_cap)
    for alpha in multi_indices(system.s, depth_cap + 1):
        for p in range(system.top + 1):
            if (alpha, p) in maps:
                continue
            q = working.target_position(alpha, p)
            rhs = PolyMatrix.zeros(spec, res.module_rank(q - 1), res.module_rank(p))
            if q - 1 == p:
                rhs = PolyMatrix.identity(spec, res.module_rank(p), _delta(alpha, system.ws, spec))
            rhs = rhs - _inhomogeneous_part(working, alpha, p)
            label = f"sigma{list(alpha)} at G_{p}"
            if res.module_rank(q) == 0:
                if not rhs.is_zero():
                    raise InternalInconsistencyError(f"{label}: nonzero obstruction with zero target")
                continue
            maps[(alpha, p)] = _solve_columns(rhs, res.differential(q), res.frame(q - 1), spec, label)
        logger.info("homotopies of size %d solved for alpha=%s", sum(alpha), list(alpha))
    if settings.check_identities and not relations_hold(working):
        raise InternalInconsistencyError("homotopy relations do not hold")
    return working


def _validate(res: FreeResolution, ws: Sequence[Poly], *, hypersurface: bool):
    if res.minimized or res.basis is None:
        raise PreconditionError("homotopies need a Schreyer resolution with its standard basis")
    for w in ws:
        if not w:
            raise PreconditionError("w must be nonzero")
        if hypersurface and ord_m(w) <= 1:
            raise PreconditionError("w must lie in the square of the maximal ideal")
        if not ideal_member(w, res.basis):
            raise PreconditionError("w does not lie in the ideal being resolved")
    if len(ws) == 2:
        g = ws[0].gcd(ws[1])
        if not constant_term(g):
            raise PreconditionError("w1, w2 share a non-unit factor; not a regular sequence")


def homotopy_chain(res: FreeResolution, w: Poly) -> HomotopySystem:
    """Chain homotopies K_i with K_i F_i + F_{i+1} K_{i+1} = w * id."""
    _validate(res, (w,), hypersurface=True)
    return _complete(HomotopySystem(res, (w,), {}, 0), 0)


def higher_homotopies(system: HomotopySystem, depth_cap: int | None = None) -> HomotopySystem:
    """All K_i^{(a)} with a <= depth_cap (default: resolution length)."""
    cap = system.resolution.length if depth_cap is None else depth_cap
    if cap <= system.depth_cap:
        return system
    return _complete(system, cap)


def hypersurface_homotopies(res: FreeResolution, w: Poly, depth_cap: int | None = None) -> HomotopySystem:
    return higher_homotopies(homotopy_chain(res, w), depth_cap)


def ci_homotopies(res: FreeResolution, w1: Poly, w2: Poly, depth_cap: int | None = None) -> HomotopySystem:
    """K (for w1), L (for w2), G and higher connecting maps up to depth_cap."""
    _validate(res, (w1, w2), hypersurface=False)
    cap = res.length if depth_cap is None else depth_cap
    return _complete(HomotopySystem(res, (w1, w2), {}, 0), cap)


def ci_projection(system: HomotopySystem, c1: Poly, c2: Poly) -> HomotopySystem:
    """Hypersurface system tau_n = sum_{|alpha|=n} c^alpha sigma_alpha for w = c1*w1 + c2*w2."""
    if system.s != 2:
        raise PreconditionError("projection needs a two-element system")
    maps = {}
    for n in range(1, system.depth_cap + 2):
        for p in range(system.top + 1):
            q = p + 2 * n - 1
            if system.resolution.module_rank(q) == 0:
                continue
            total = PolyMatrix.zeros(system.spec, system.resolution.module_rank(q), system.resolution.module_rank(p))
            for alpha in multi_indices(2, n):
                if sum(alpha) == n:
                    total = total + system.sigma(alpha, p).scale(c1 ** alpha[0] * c2 ** alpha[1])
            maps[((n,), p)] = total
    w = c1 * system.ws[0] + c2 * system.ws[1]
    return HomotopySystem(system.resolution, (w,), maps, system.depth_cap, system.leading)


def relations_hold(system: HomotopySystem) -> bool:
    return all(
        relation_residual(system, alpha, p).is_zero()
        for alpha in system.multi_indices()
        for p in range(system.top + 1)
    )


def beyond_support_vanishes(system: HomotopySystem) -> bool:
    """The relation for the next size holds with all new maps zero."""
    next_size = system.depth_cap + 2
    return all(
        relation_residual(system, alpha, p).is_zero()
        for alpha in multi_indices(system.s, next_size)
        if sum(alpha) == next_size
        for p in range(system.top + 1)
    )


def leading_homotopies(system: HomotopySystem) -> HomotopySystem:
    """
    Keep the part of every entry of sigma_alpha^{(p)} of P-order exactly
    mark^{(p)}_n + sum_j alpha_j d_j - mark^{(q)}_m, paired with the
    leading complex and the leading forms of the w's.
    """
    res = system.resolution
    spec = system.spec
    orders = system.orders
    maps = {}
    for (alpha, p), matrix in system.maps.items():
        q = system.target_position(alpha, p)
        shift = sum(a * d for a, d in zip(alpha, orders))
        src, tgt = res.marks(p), res.marks(q)
        maps[(alpha, p)] = matrix.map_entries(
            lambda m, n, e, src=src, tgt=tgt, shift=shift: p_part(e, spec, src[n] + shift - tgt[m]) if e else e
        )
    ws = tuple(leading_form_p(w, spec)[0] for w in system.ws)
    return HomotopySystem(leading_complex(res), ws, maps, system.depth_cap, leading=True)


# ============================================================================
# Block Matrix Factorizations
# ============================================================================

@dataclass(frozen=True)
class MatrixFactorization:
    A: PolyMatrix
    B: PolyMatrix
    w: Poly
    even_positions: tuple[int, ...] = ()
    odd_positions: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return self.A.nrows

    def holds(self) -> bool:
        if self.A.shape != (self.B.ncols, self.B.nrows) or self.A.nrows != self.A.ncols:
            return False
        ring = self.A.ring
        ident = PolyMatrix(ring, self.size, self.size, tuple(
            tuple(self.w if i == j else ring.zero for j in range(self.size)) for i in range(self.size)
        ))
        return (self.A @ self.B) == ident and (self.B @ self.A) == ident


def assemble_block_mf(system: HomotopySystem, k_prime: int | None = None) -> MatrixFactorization:
    """
    A : (+) G_even -> (+) G_odd and B : (+) G_odd -> (+) G_even built from
    the differentials and the higher homotopies, with A B = B A = w * id.

    Below the diagonal the staircase holds the layers K^{(a)} with a <= k_prime
    (default floor(k/2), the deepest layer that fits). Layers left out must
    vanish, otherwise the product identity would not hold.
    """
    if system.s != 1:
        raise PreconditionError("block factorizations need a single element w")
    res = system.resolution
    if k_prime is None:
        k_prime = res.length // 2
    if k_prime < 0 or 2 * k_prime > res.length:
        raise InsufficientLengthError(
            f"k'={k_prime} needs a resolution of length at least {2 * k_prime}, got {res.length}"
        )
    system = higher_homotopies(system)
    spec = system.spec
    even = tuple(p for p in range(0, system.top + 1, 2) if res.module_rank(p))
    odd = tuple(p for p in range(1, system.top + 1, 2) if res.module_rank(p))

    def layer(row: int, col: int) -> PolyMatrix | None:
        order = (row - col + 1) // 2
        block = system.sigma((order,), col)
        if order - 1 <= k_prime:
            return block
        if not block.is_zero():
            raise PreconditionError(
                f"K_{col}^({order - 1}) is nonzero but k'={k_prime} leaves it out of the staircase"
            )
        return None

    a_blocks = {}
    for bi, row in enumerate(odd):
        for bj, col in enumerate(even):
            if col == row + 1:
                a_blocks[(bi, bj)] = res.differential(col)
            elif col <= row and (block := layer(row, col)) is not None:
                a_blocks[(bi, bj)] = block
    b_blocks = {}
    for bi, row in enumerate(even):
        for bj, col in enumerate(odd):
            if col == row + 1:
                b_blocks[(bi, bj)] = res.differential(col)
            elif col < row and (block := layer(row, col)) is not None:
                b_blocks[(bi, bj)] = block

    odd_sizes = [res.module_rank(p) for p in odd]
    even_sizes = [res.module_rank(p) for p in even]
    A = block_matrix(spec, odd_sizes, even_sizes, a_blocks)
    B = block_matrix(spec, even_sizes, odd_sizes, b_blocks)
    mf = MatrixFactorization(A, B, system.ws[0], even, odd)
    if settings.check_identities and not mf.holds():
        raise InternalInconsistencyError("assembled blocks do not multiply to w * id")
    logger.info("matrix factorization of size %d assembled", mf.size)
    return mf


# ============================================================================
# Totalizations over R/(w) and R/(w1, w2)
# ============================================================================

@dataclass(frozen=True)
class Summand:
    position: int
    beta: MultiIndex
    marks: tuple[int, ...]
    twists: tuple[int, ...]


@dataclass(frozen=True)
class TotalTerm:
    index: int
    summands: tuple[Summand, ...]

    @property
    def rank(self) -> int:
        return sum(len(s.marks) for s in self.summands)

    @property
    def marks(self) -> tuple[int, ...]:
        return tuple(m for s in self.summands for m in s.marks)


@dataclass(frozen=True)
class PeriodicResolutionS:
    """
    Terms V_{-1}, V_0, ..., V_length and maps D_i : V_i -> V_{i-1} for
    i = 0..length (``maps[i]``). Past ``tail_start`` the terms repeat with
    period 2, every mark raised by the order of w.
    """

    system: HomotopySystem
    r: int
    terms: tuple[TotalTerm, ...]
    maps: tuple[PolyMatrix, ...]
    signed: bool
    tail_start: int
    period: int = 2
    extra: dict = field(default_factory=dict)

    def term(self, i: int) -> TotalTerm:
        return self.terms[i + 1]


def _betas(s: int, size: int) -> list[MultiIndex]:
    found = [beta for beta in product(range(size + 1), repeat=s) if sum(beta) == size]
    return sorted(found, reverse=True)


def _build_term(system: HomotopySystem, i: int, r: int) -> TotalTerm:
    res = system.resolution
    orders = system.orders
    summands = []
    size = 0
    while (p := i + 1 - 2 * size) >= 0:
        for beta in _betas(system.s, size):
            if res.module_rank(p) == 0:
                continue
            shift = sum(b * d for b, d in zip(beta, orders))
            marks = tuple(m + shift for m in res.marks(p))
            summands.append(Summand(p, beta, marks, tuple(r - m for m in marks)))
        size += 1
    summands.sort(key=lambda s: (s.position, tuple(-b for b in s.beta)))
    return TotalTerm(i, tuple(summands))


def _total_map(system: HomotopySystem, source: TotalTerm, target: TotalTerm, signed: bool) -> PolyMatrix:
    blocks = {}
    for bj, col in enumerate(source.summands):
        for bi, row in enumerate(target.summands):
            alpha = tuple(b - c for b, c in zip(col.beta, row.beta))
            if any(a < 0 for a in alpha):
                continue
            if not any(alpha):
                if row.position != col.position - 1:
                    continue
                block = system.resolution.differential(col.position)
            else:
                if row.position != system.target_position(alpha, col.position):
                    continue
                block = system.sigma(alpha, col.position)
            if signed and (col.position * sum(col.beta) + row.position * sum(row.beta)) % 2:
                block = -block
            blocks[(bi, bj)] = block
    return block_matrix(
        system.spec,
        [len(s.marks) for s in target.summands],
        [len(s.marks) for s in source.summands],
        blocks,
    )


def _totalize(system: HomotopySystem, length: int, r: int, signed: bool) -> PeriodicResolutionS:
    res = system.resolution
    system = higher_homotopies(system)
    terms = tuple(_build_term(system, i, r) for i in range(-1, length + 1))
    maps = tuple(
        _total_map(system, terms[i + 1], terms[i], signed) for i in range(0, length + 1)
    )
    return PeriodicResolutionS(system, r, terms, maps, signed, tail_start=res.length + 1)


def standard_resolution_S(
    system: HomotopySystem, length: int, r: int = 0, *, signed: bool = False
) -> PeriodicResolutionS:
    """Resolution of R/I over S = R/(w) from the differentials and the higher homotopies."""
    if system.s != 1:
        raise PreconditionError("standard_resolution_S needs a single element w")
    if length < system.resolution.length + 2:
        raise PreconditionError(
            f"length {length} is below the resolution length {system.resolution.length} plus 2"
        )
    return _totalize(system, length, r, signed)


def ci_totalization(
    system: HomotopySystem, length: int, r: int = 0, *, signed: bool = False
) -> PeriodicResolutionS:
    """Complex over R/(w1, w2) assembled from F, K, L, G and the higher maps."""
    if system.s != 2:
        raise PreconditionError("ci_totalization needs a two-element system")
    if length < 1:
        raise PreconditionError(f"length must be at least 1, got {length}")
    return _totalize(system, length, r, signed)


def quotient_basis(system: HomotopySystem) -> StandardBasis:
    return standard_basis(list(system.ws), system.spec)


def composites_vanish_mod(total: PeriodicResolutionS) -> bool:
    """Consecutive composites have every entry in (w_1, ..., w_s)."""
    basis = quotient_basis(total.system)
    for left, right in zip(total.maps, total.maps[1:]):
        for _, _, entry in (left @ right).entries():
            if entry and not ideal_member(entry, basis):
                return False
    return True


def tail_matches(total: PeriodicResolutionS, mf: MatrixFactorization) -> bool:
    """Unsigned tail maps alternate A (odd i) and B (even i)."""
    maps = total.maps
    if total.signed:
        maps = _totalize(total.system, len(maps) - 1, total.r, signed=False).maps
    for i in range(total.tail_start, len(maps)):
        if maps[i] != (mf.A if i % 2 else mf.B):
            return False
    return True


def tail_periodic(total: PeriodicResolutionS) -> bool:
    """Terms two apart in the tail agree after raising marks by the order of w."""
    orders = total.system.orders
    last = len(total.maps) - 1
    for i in range(total.tail_start, last - 1):
        if total.maps[i] != total.maps[i + 2]:
            return False
        now, later = total.term(i), total.term(i + 2)
        if len(now.summands) != len(later.summands):
            return False
        for a, b in zip(now.summands, later.summands):
            if a.position != b.position or tuple(m + orders[0] for m in a.marks) != b.marks:
                return False
    return True


def _is_graded(total: PeriodicResolutionS) -> bool:
    spec = total.system.spec
    if spec.c != spec.n or not all(is_homogeneous(w) for w in total.system.ws):
        return False
    for i, matrix in enumerate(total.maps):
        src, tgt = total.term(i).marks, total.term(i - 1).marks
        for m, n, e in matrix.entries():
            if e and any(sum(mon) != src[n] - tgt[m] for mon in e.keys()):
                return False
    return True


def _standard_monomials(spec: RingSpec, basis: StandardBasis, degree: int):
    initials = [vec_initial((g,), ModuleFrame.for_ring(spec), spec)[1] for g in basis.elements]
    return [m for m in monomials_of_degree(spec.n, degree) if not any(divides(i, m) for i in initials)]


def _quotient_graded_rank(total, basis, i: int, degree: int) -> tuple[int, int]:
    spec = total.system.spec
    matrix = total.maps[i]
    src_marks, tgt_marks = total.term(i).marks, total.term(i - 1).marks
    src = [(l, mu) for l, mark in enumerate(src_marks) for mu in _standard_monomials(spec, basis, degree - mark)]
    tgt = [(l, mu) for l, mark in enumerate(tgt_marks) for mu in _standard_monomials(spec, basis, degree - mark)]
    index = {key: k for k, key in enumerate(tgt)}
    rows = [[spec.domain.zero] * len(src) for _ in tgt]
    for j, (l, mu) in enumerate(src):
        for m in range(matrix.nrows):
            entry = matrix[m, l]
            if not entry:
                continue
            unit, remainder, reduced = normal_form(entry.mul_monom(mu), basis)
            if unit != spec.ring.one or not reduced:
                raise InternalInconsistencyError("graded normal form left a non-standard remainder")
            for monom, coeff in remainder.items():
                rows[index[(m, monom)]][j] += coeff
    if not src or not tgt:
        return len(src), 0
    return len(src), rank(DomainMatrix(rows, (len(tgt), len(src)), spec.domain))


def quotient_exactness(total: PeriodicResolutionS, cap: int) -> dict | None:
    """
    Degreewise exactness at V_0, ..., V_{length-1} over the graded quotient
    ring (homogeneous data with c = n only). Returns
    {i: {degree: (dim ker, dim im)}} or None when not applicable.
    """
    if not _is_graded(total):
        return None
    basis = quotient_basis(total.system)
    table: dict[int, dict[int, tuple[int, int]]] = {}
    for i in range(0, len(total.maps) - 1):
        table[i] = {}
        for d in range(cap + 1):
            dim_src, rank_here = _quotient_graded_rank(total, basis, i, d)
            _, rank_next = _quotient_graded_rank(total, basis, i + 1, d)
            table[i][d] = (dim_src - rank_here, rank_next)
    return table


def valuation_windows(total: PeriodicResolutionS, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Negated marks of the source and target of maps[i]."""
    return (
        tuple(-m for m in total.term(i).marks),
        tuple(-m for m in total.term(i - 1).marks),
    )


__all__ = [
    "HomotopySystem",
    "MatrixFactorization",
    "PeriodicResolutionS",
    "Summand",
    "TotalTerm",
    "assemble_block_mf",
    "beyond_support_vanishes",
    "ci_homotopies",
    "ci_projection",
    "ci_totalization",
    "composites_vanish_mod",
    "higher_homotopies",
    "homotopy_chain",
    "hypersurface_homotopies",
    "leading_homotopies",
    "multi_indices",
    "quotient_exactness",
    "relation_residual",
    "relations_hold",
    "standard_resolution_S",
    "tail_matches",
    "tail_periodic",
    "valuation_windows",
]
