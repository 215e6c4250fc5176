"""
Division in the Localized Ring

Mora's weak normal form, for polynomials and for vectors of a free module
ordered by a ModuleFrame. Every call returns

    unit * f = sum(quotients[i] * g_i) + remainder

exactly, with ``unit`` a unit of k[x]_m (constant term 1) and no divisor
initial dividing the initial term of the remainder.

Note: Why the set of reducers grows
-----------------------------------
In a local order, plain division can loop forever: x reduced by x - x^2
gives x^2, then x^3, ... Mora's fix is to also allow the intermediate
results as reducers (picking the reducer of smallest ecart). Reducing by
an intermediate result is what produces the non-trivial unit: dividing x by
x - x^2 ends with (1 - x) * x = 1 * (x - x^2).

Reducing the rest of the remainder (its tail) runs the same ecart strategy
on the terms after the first reducible one, within ``settings.tail_budget``
steps. When that stalls (the unit keeps reintroducing the term it just
cleared), unit, quotients and remainder are solved for directly as a linear
system over k, with u and q_i of degree at most ``settings.tail_degree``.
A fully reduced remainder need not exist with polynomial data: (1 - x)y
divided by x - x^2 has none. ``reduced`` tells which case happened.
"""

from dataclasses import dataclass
import logging
from typing import Sequence

from sympy.polys.monomials import monomial_div, monomial_mul

from app.dependencies.external.store.settings import settings

from .coeffring import Monomial, ModuleFrame, RingSpec
from .errors import InternalInconsistencyError, ResourceCeilingError
from .linalg import monomials_of_degree, solve
from .poly import (
    Poly,
    Vec,
    constant_term,
    divides,
    exact_quotient,
    unit_vec,
    vec_add,
    vec_ecart,
    vec_initial,
    vec_is_zero,
    vec_mul_term,
    vec_scale,
    vec_sub,
    vec_terms,
    zero_vec,
)

logger = logging.getLogger(__name__)


# ============================================================================
# Result Types
# ============================================================================

@dataclass(frozen=True)
class DivisionResult:
    unit: Poly
    quotients: tuple[Poly, ...]
    remainder: Poly
    reduced: bool
    steps: int


@dataclass(frozen=True)
class ModuleDivisionResult:
    unit: Poly
    quotients: tuple[Poly, ...]
    remainder: Vec
    reduced: bool
    steps: int


@dataclass(frozen=True)
class Combination:
    """``den * element == sum(coeffs[t] * generators[t])`` with ``den`` a unit."""

    den: Poly
    coeffs: tuple[Poly, ...]


@dataclass(frozen=True)
class LocalBasis:
    elements: tuple[Poly, ...]
    combinations: tuple[Combination, ...]
    is_local_basis: bool


# ============================================================================
# Step Accounting
# ============================================================================

class _BudgetExhausted(Exception):
    pass


class _StepCounter:
    def __init__(self, ceiling: int, soft: bool = False):
        self.ceiling = ceiling
        self.soft = soft
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.steps > self.ceiling:
            if self.soft:
                raise _BudgetExhausted()
            raise ResourceCeilingError(
                f"division exceeded {self.ceiling} reduction steps",
                ceiling=self.ceiling,
            )


@dataclass
class _Reducer:
    vec: Vec
    unit_part: Poly
    quotient_part: tuple[Poly, ...]
    ecart: int
    component: int
    monom: Monomial
    coeff: object


# ============================================================================
# Mora Weak Normal Form
# ============================================================================

def _weak_normal_form(
    target: Vec,
    divisors: Sequence[Vec],
    frame: ModuleFrame,
    spec: RingSpec,
    counter: _StepCounter,
) -> tuple[Poly, list[Poly], Vec]:
    ring = spec.ring
    count = len(divisors)
    reducers: list[_Reducer] = []
    for i, g in enumerate(divisors):
        if vec_is_zero(g):
            continue
        k, m, c = vec_initial(g, frame, spec)
        reducers.append(
            _Reducer(g, ring.zero, unit_vec(spec, count, i), vec_ecart(g, frame, spec), k, m, c)
        )

    h = target
    unit = ring.one
    quotients = [ring.zero] * count
    while not vec_is_zero(h):
        k, m, c = vec_initial(h, frame, spec)
        candidates = [t for t in reducers if t.component == k and divides(t.monom, m)]
        if not candidates:
            break
        # min() keeps the first of equal ecarts: lowest index wins
        best = min(candidates, key=lambda t: t.ecart)
        h_ecart = vec_ecart(h, frame, spec)
        if best.ecart > h_ecart:
            reducers.append(
                _Reducer(h, unit, tuple(-q for q in quotients), h_ecart, k, m, c)
            )
        factor = (monomial_div(m, best.monom), spec.domain.quo(c, best.coeff))
        h = vec_sub(h, vec_mul_term(best.vec, *factor))
        if best.unit_part:
            unit = unit - best.unit_part.mul_term(factor)
        quotients = [
            q + b.mul_term(factor) if b else q for q, b in zip(quotients, best.quotient_part)
        ]
        counter.tick()
    return unit, quotients, h


def _first_reducible(r: Vec, initials, frame: ModuleFrame, spec: RingSpec) -> int | None:
    for position, (k, m, _) in enumerate(vec_terms(r, frame, spec)):
        if any(k == ik and divides(im, m) for ik, im in initials):
            return position
    return None


def _reduce_tail(
    unit: Poly,
    quotients: list[Poly],
    remainder: Vec,
    divisors: Sequence[Vec],
    frame: ModuleFrame,
    spec: RingSpec,
    counter: _StepCounter,
) -> tuple[Poly, list[Poly], Vec, bool]:
    initials = [vec_initial(g, frame, spec)[:2] for g in divisors if not vec_is_zero(g)]
    budget = _StepCounter(settings.tail_budget, soft=True)
    u, qs, r = unit, list(quotients), remainder
    try:
        while True:
            position = _first_reducible(r, initials, frame, spec)
            if position is None:
                counter.steps += budget.steps
                return u, qs, r, True
            ordered = vec_terms(r, frame, spec)
            head = zero_vec(spec, len(r))
            for k, m, c in ordered[:position]:
                head = vec_add(head, vec_mul_term(unit_vec(spec, len(r), k), m, c))
            rest = vec_sub(r, head)
            sub_unit, sub_q, sub_r = _weak_normal_form(rest, divisors, frame, spec, budget)
            stepped = vec_add(vec_scale(head, sub_unit), sub_r)
            if stepped == r:
                raise _BudgetExhausted()
            r = stepped
            qs = [sub_unit * q + sq for q, sq in zip(qs, sub_q)]
            u = sub_unit * u
    except _BudgetExhausted:
        counter.steps += budget.steps
        logger.debug("tail reduction stalled after %d steps", budget.steps)
        return unit, list(quotients), remainder, False


def _solve_reduced(
    target: Vec,
    divisors: Sequence[Vec],
    frame: ModuleFrame,
    spec: RingSpec,
    bound: int,
) -> tuple[Poly, list[Poly], Vec] | None:
    """
    Look for ``u*f = sum(q_i*g_i) + r`` with u(0) = 1, deg u, deg q_i <= bound,
    in(q_i g_i) >= in(f) and no monomial of r in the initial module.
    Returns None when no such data of that degree exists.
    """
    ring, domain = spec.ring, spec.domain
    rank = len(target)
    live = [(i, g) for i, g in enumerate(divisors) if not vec_is_zero(g)]
    initials = [vec_initial(g, frame, spec)[:2] for _, g in live]
    floor = frame.key(*vec_initial(target, frame, spec)[:2], spec)
    low = [m for d in range(bound + 1) for m in monomials_of_degree(spec.n, d)]

    # unknowns: u - 1, then every q_i, then r
    columns: list[tuple[str, int, Monomial, Vec]] = []
    for m in low[1:]:
        columns.append(("u", 0, m, vec_mul_term(target, m, domain.one)))
    for (i, g), (ik, im) in zip(live, initials):
        for m in low:
            if frame.key(ik, monomial_mul(m, im), spec) >= floor:
                columns.append(("q", i, m, vec_mul_term(g, m, -domain.one)))

    row_index: dict[tuple[int, Monomial], int] = {}
    for v in [target] + [col for *_, col in columns]:
        for k, a in enumerate(v):
            for m in a.keys():
                row_index.setdefault((k, m), len(row_index))
    for (k, m) in list(row_index):
        if not any(k == ik and divides(im, m) for ik, im in initials):
            columns.append(("r", k, m, vec_mul_term(unit_vec(spec, rank, k), m, -domain.one)))

    rows = [[domain.zero] * len(columns) for _ in row_index]
    for j, (*_, col) in enumerate(columns):
        for k, a in enumerate(col):
            for m, c in a.items():
                rows[row_index[(k, m)]][j] = c
    rhs = [domain.zero] * len(row_index)
    for k, a in enumerate(target):
        for m, c in a.items():
            rhs[row_index[(k, m)]] = -c

    solution = solve(rows, rhs, domain, len(columns))
    if solution is None:
        return None
    unit = ring.one
    quotients = [ring.zero] * len(divisors)
    remainder = list(zero_vec(spec, rank))
    for (kind, index, m, _), value in zip(columns, solution):
        if not value:
            continue
        term = ring.from_dict({m: value})
        if kind == "u":
            unit += term
        elif kind == "q":
            quotients[index] += term
        else:
            remainder[index] += term
    return unit, quotients, tuple(remainder)


def _check_identity(unit, quotients, remainder, target, divisors):
    rhs = remainder
    for q, g in zip(quotients, divisors):
        if q:
            rhs = vec_add(rhs, vec_scale(g, q))
    if vec_scale(target, unit) != rhs:
        raise InternalInconsistencyError("division identity unit*f = sum(q*g) + r failed")
    if not constant_term(unit):
        raise InternalInconsistencyError("division produced a non-unit multiplier")


def _divide(
    target: Vec,
    divisors: Sequence[Vec],
    frame: ModuleFrame,
    spec: RingSpec,
    reduce_tail: bool,
):
    counter = _StepCounter(settings.step_ceiling)
    unit, quotients, remainder = _weak_normal_form(target, divisors, frame, spec, counter)
    reduced = False
    if reduce_tail and not vec_is_zero(remainder):
        unit, quotients, remainder, reduced = _reduce_tail(
            unit, quotients, remainder, divisors, frame, spec, counter
        )
        bound = 0
        while not reduced and bound <= settings.tail_degree:
            solved = _solve_reduced(target, divisors, frame, spec, bound)
            if solved is not None:
                unit, quotients, remainder = solved
                reduced = True
                logger.debug("tail reduced by a degree %d linear solve", bound)
            bound += 1
    initials = [vec_initial(g, frame, spec)[:2] for g in divisors if not vec_is_zero(g)]
    if vec_is_zero(remainder):
        reduced = True
    elif not reduced:
        reduced = _first_reducible(remainder, initials, frame, spec) is None
    if settings.check_identities:
        _check_identity(unit, quotients, remainder, target, divisors)
    return unit, tuple(quotients), remainder, reduced, counter.steps


def mora_divide(
    f: Poly,
    divisors: Sequence[Poly],
    spec: RingSpec,
    *,
    reduce_tail: bool = True,
) -> DivisionResult:
    """
    Divide f by ``divisors`` in k[x]_m.

    The reducer with the smallest ecart is used; ties go to the lowest index,
    so results are reproducible. ``reduce_tail`` additionally tries to clear
    every remainder monomial divisible by a divisor initial.
    """
    unit, quotients, remainder, reduced, steps = _divide(
        (f,), [(g,) for g in divisors], ModuleFrame.for_ring(spec), spec, reduce_tail
    )
    return DivisionResult(unit, quotients, remainder[0], reduced, steps)


def mora_divide_vector(
    v: Vec,
    divisors: Sequence[Vec],
    frame: ModuleFrame,
    spec: RingSpec,
    *,
    reduce_tail: bool = False,
) -> ModuleDivisionResult:
    """Module version of ``mora_divide``; terms are compared through ``frame``."""
    unit, quotients, remainder, reduced, steps = _divide(v, divisors, frame, spec, reduce_tail)
    return ModuleDivisionResult(unit, quotients, remainder, reduced, steps)


def division_holds(f: Poly, divisors: Sequence[Poly], result: DivisionResult) -> bool:
    rhs = result.remainder
    for q, g in zip(result.quotients, divisors):
        rhs += q * g
    return result.unit * f == rhs and bool(constant_term(result.unit))


# ============================================================================
# Combinations and Local Bases
# ============================================================================

def compose_combination(
    spec: RingSpec,
    den: Poly,
    coeffs: Sequence[Poly],
    combinations: Sequence[Combination],
) -> Combination:
    """
    Given ``den * h == sum(coeffs[j] * b_j)`` and combinations of the b_j in terms
    of generators, return the combination of h in terms of the generators.
    """
    denominators: list[Poly] = []
    for c, comb in zip(coeffs, combinations):
        if c and comb.den != spec.ring.one and comb.den not in denominators:
            denominators.append(comb.den)
    common = spec.ring.one
    for d in denominators:
        common *= d
    width = len(combinations[0].coeffs) if combinations else 0
    total = [spec.ring.zero] * width
    for c, comb in zip(coeffs, combinations):
        if not c:
            continue
        scale = exact_quotient(common, comb.den)
        for t, a in enumerate(comb.coeffs):
            if a:
                total[t] += c * scale * a
    return Combination(den * common, tuple(total))


def combination_holds(element: Vec, generators: Sequence[Vec], comb: Combination) -> bool:
    rhs = tuple(a - a for a in element)
    for a, g in zip(comb.coeffs, generators):
        if a:
            rhs = vec_add(rhs, vec_scale(g, a))
    return vec_scale(element, comb.den) == rhs and bool(constant_term(comb.den))


def _tail_reducible(elements: Sequence[Vec], frame: ModuleFrame, spec: RingSpec) -> bool:
    initials = [vec_initial(g, frame, spec)[:2] for g in elements]
    for g in elements:
        ordered = vec_terms(g, frame, spec)
        for k, m, _ in ordered[1:]:
            if any(k == ik and divides(im, m) for ik, im in initials):
                return True
    return False


def preprocess_vectors(
    vectors: Sequence[Vec],
    frame: ModuleFrame,
    spec: RingSpec,
) -> tuple[list[Vec], list[Combination], bool]:
    """
    Successively divide the tail of each element by all elements, replacing
    ``f = lt + tail`` by ``lt + r/u`` whenever the unit u divides the new tail
    exactly. Initial terms never change.
    """
    ring = spec.ring
    count = len(vectors)
    elements = list(vectors)
    combinations = [Combination(ring.one, unit_vec(spec, count, i)) for i in range(count)]
    for _ in range(2 * count + 2):
        changed = False
        for i, f in enumerate(elements):
            if vec_is_zero(f):
                continue
            k, m, c = vec_initial(f, frame, spec)
            lead = vec_mul_term(unit_vec(spec, len(f), k), m, c)
            rest = vec_sub(f, lead)
            if vec_is_zero(rest):
                continue
            initials = [vec_initial(g, frame, spec)[:2] for g in elements if not vec_is_zero(g)]
            if _first_reducible(rest, initials, frame, spec) is None:
                continue
            result = mora_divide_vector(rest, elements, frame, spec, reduce_tail=True)
            new_tail = []
            for a in result.remainder:
                q = exact_quotient(a, result.unit) if a else a
                if q is None:
                    break
                new_tail.append(q)
            else:
                candidate = vec_add(lead, tuple(new_tail))
                if candidate == f:
                    continue
                coeffs = [-q for q in result.quotients]
                coeffs[i] += result.unit
                combinations[i] = compose_combination(spec, result.unit, coeffs, combinations)
                elements[i] = candidate
                changed = True
                continue
            logger.debug("unit %s does not divide the reduced tail; element %d kept", result.unit, i)
        if not changed:
            break
    live = [g for g in elements if not vec_is_zero(g)]
    return elements, combinations, not _tail_reducible(live, frame, spec)


def local_basis_preprocess(gens: Sequence[Poly], spec: RingSpec) -> LocalBasis:
    """Rewrite generators so that no initial monomial divides a monomial of any tail."""
    frame = ModuleFrame.for_ring(spec)
    elements, combinations, clean = preprocess_vectors([(g,) for g in gens], frame, spec)
    monic_elements = []
    monic_combinations = []
    for (g,), comb in zip(elements, combinations):
        if g:
            lc = vec_initial((g,), frame, spec)[2]
            g = g.quo_ground(lc)
            comb = Combination(comb.den * lc, comb.coeffs)
        monic_elements.append(g)
        monic_combinations.append(comb)
    return LocalBasis(tuple(monic_elements), tuple(monic_combinations), clean)
