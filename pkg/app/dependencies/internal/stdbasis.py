"""
Standard Bases

Buchberger-Mora completion in k[x]_m for ideals and for submodules of free
modules, S-polynomials, ideal membership and the measure-basis test.

The completion uses the normal strategy (the pair with the smallest LCM in
the flag order is treated first) and skips pairs by the chain criterion.
Every basis element keeps a Combination expressing it through the input
generators, so ideal equality can be attested directly.
"""

from dataclasses import dataclass
import logging
from typing import Sequence

from sympy.polys.monomials import monomial_div, monomial_lcm

from app.dependencies.external.store.settings import settings

from .coeffring import ModuleFrame, RingSpec
from .errors import DomainError, ResourceCeilingError
from .localdiv import (
    Combination,
    combination_holds,
    compose_combination,
    mora_divide_vector,
    preprocess_vectors,
)
from .poly import (
    Poly,
    Vec,
    divides,
    leading_form_p,
    unit_vec,
    vec_initial,
    vec_is_zero,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StandardBasis:
    """
    A standard basis sorted ascending by initial term.

    For ideals ``elements`` and ``generators`` hold polynomials; for
    submodules they hold vectors and ``frame`` orders their terms.
    ``reduced`` is true when no initial term divides any other term of any
    element (tail reduction completed within the budget).
    """

    spec: RingSpec
    generators: tuple
    elements: tuple
    combinations: tuple[Combination, ...]
    reduced: bool
    frame: ModuleFrame | None = None
    pairs_treated: int = 0

    @property
    def is_module(self) -> bool:
        return self.frame is not None

    @property
    def vectors(self) -> list[Vec]:
        return list(self.elements) if self.is_module else [(g,) for g in self.elements]

    @property
    def vector_frame(self) -> ModuleFrame:
        return self.frame if self.frame is not None else ModuleFrame.for_ring(self.spec)

    def __len__(self) -> int:
        return len(self.elements)


# ============================================================================
# S-polynomials
# ============================================================================

def s_vector(u: Vec, v: Vec, frame: ModuleFrame, spec: RingSpec) -> tuple[Vec, tuple[Poly, Poly]]:
    """
    S(u, v) = p_u*u + p_v*v cancelling the initial terms. Vectors whose
    initial terms lie in different components have S = 0 and p = (0, 0).
    """
    ring = spec.ring
    ku, mu, cu = vec_initial(u, frame, spec)
    kv, mv, cv = vec_initial(v, frame, spec)
    if ku != kv:
        return tuple(ring.zero for _ in u), (ring.zero, ring.zero)
    lcm = monomial_lcm(mu, mv)
    pu = ring({monomial_div(lcm, mu): spec.domain.quo(spec.domain.one, cu)})
    pv = ring({monomial_div(lcm, mv): -spec.domain.quo(spec.domain.one, cv)})
    s = tuple(a * pu + b * pv for a, b in zip(u, v))
    return s, (pu, pv)


def s_poly(f: Poly, g: Poly, spec: RingSpec) -> tuple[Poly, tuple[Poly, Poly]]:
    """S(f, g) = p_f*f + p_g*g with in(p_f*f) = in(p_g*g) cancelled."""
    s, coeffs = s_vector((f,), (g,), ModuleFrame.for_ring(spec), spec)
    return s[0], coeffs


# ============================================================================
# Completion
# ============================================================================

def _monic_with_combination(v: Vec, comb: Combination, frame: ModuleFrame, spec: RingSpec):
    lc = vec_initial(v, frame, spec)[2]
    return tuple(a.quo_ground(lc) for a in v), Combination(comb.den * lc, comb.coeffs)


def _chain_skippable(i, j, pending, basis_initials, lcm, component) -> bool:
    for k, (kk, mk) in enumerate(basis_initials):
        if k in (i, j) or kk != component:
            continue
        if not divides(mk, lcm):
            continue
        if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
            continue
        return True
    return False


def _complete(vectors: Sequence[Vec], frame: ModuleFrame, spec: RingSpec):
    count = len(vectors)
    basis: list[Vec] = []
    combos: list[Combination] = []
    for i, v in enumerate(vectors):
        element, comb = _monic_with_combination(
            v, Combination(spec.ring.one, unit_vec(spec, count, i)), frame, spec
        )
        basis.append(element)
        combos.append(comb)
    initials = [vec_initial(g, frame, spec)[:2] for g in basis]

    pending: set[tuple[int, int]] = {
        (i, j)
        for i in range(len(basis))
        for j in range(i + 1, len(basis))
        if initials[i][0] == initials[j][0]
    }
    treated = 0
    while pending:
        def pair_key(pair):
            i, j = pair
            k = initials[i][0]
            return (frame.key(k, monomial_lcm(initials[i][1], initials[j][1]), spec), pair)

        i, j = min(pending, key=pair_key)
        pending.discard((i, j))
        component = initials[i][0]
        lcm = monomial_lcm(initials[i][1], initials[j][1])
        if _chain_skippable(i, j, pending, initials, lcm, component):
            continue
        treated += 1
        if treated > settings.pair_ceiling:
            raise ResourceCeilingError(
                f"standard basis completion exceeded {settings.pair_ceiling} pairs",
                ceiling=settings.pair_ceiling,
            )
        s, (pi, pj) = s_vector(basis[i], basis[j], frame, spec)
        if vec_is_zero(s):
            continue
        result = mora_divide_vector(s, basis, frame, spec)
        if vec_is_zero(result.remainder):
            continue
        coeffs = [-q for q in result.quotients]
        coeffs[i] += result.unit * pi
        coeffs[j] += result.unit * pj
        comb = compose_combination(spec, spec.ring.one, coeffs, combos)
        element, comb = _monic_with_combination(result.remainder, comb, frame, spec)
        basis.append(element)
        combos.append(comb)
        initials.append(vec_initial(element, frame, spec)[:2])
        new = len(basis) - 1
        logger.debug("pair (%d, %d) added element %d", i, j, new)
        for k in range(new):
            if initials[k][0] == initials[new][0]:
                pending.add((k, new))
    return basis, combos, initials, treated


def _minimalize(basis, combos, initials):
    keep = []
    for k, (kk, mk) in enumerate(initials):
        redundant = False
        for l, (kl, ml) in enumerate(initials):
            if l == k or kl != kk or not divides(ml, mk):
                continue
            if ml != mk or l < k:
                redundant = True
                break
        if not redundant:
            keep.append(k)
    return [basis[k] for k in keep], [combos[k] for k in keep]


def _standard_basis_vectors(vectors: Sequence[Vec], frame: ModuleFrame, spec: RingSpec):
    live = [v for v in vectors if not vec_is_zero(v)]
    if not live:
        raise DomainError("a standard basis needs at least one nonzero generator")
    basis, combos, initials, treated = _complete(live, frame, spec)
    basis, combos = _minimalize(basis, combos, initials)

    reduced_elements, local_combos, clean = preprocess_vectors(basis, frame, spec)
    final_combos = [
        compose_combination(spec, comb.den, comb.coeffs, combos) for comb in local_combos
    ]
    order = sorted(
        range(len(reduced_elements)),
        key=lambda k: frame.key(*vec_initial(reduced_elements[k], frame, spec)[:2], spec),
    )
    elements = [reduced_elements[k] for k in order]
    final = [final_combos[k] for k in order]
    logger.info("standard basis: %d elements after %d pairs", len(elements), treated)
    return elements, final, clean, treated, live


def default_frame(spec: RingSpec, rank: int) -> ModuleFrame:
    """Term-over-position frame for R^rank: compare monomials, then component."""
    return ModuleFrame(shifts=(spec.one_monomial,) * rank, paths=tuple((k,) for k in range(rank)))


def standard_basis(
    gens: Sequence[Poly] | Sequence[Vec],
    spec: RingSpec,
    frame: ModuleFrame | None = None,
) -> StandardBasis:
    """
    Reduced standard basis of the ideal (or submodule) generated by ``gens``.

    Zero generators are ignored; combinations refer to the nonzero ones.
    """
    module = bool(gens) and isinstance(gens[0], tuple)
    if module:
        frame = frame or default_frame(spec, len(gens[0]))
        elements, combos, clean, treated, live = _standard_basis_vectors(list(gens), frame, spec)
        return StandardBasis(spec, tuple(live), tuple(elements), tuple(combos), clean, frame, treated)
    ring_frame = ModuleFrame.for_ring(spec)
    elements, combos, clean, treated, live = _standard_basis_vectors(
        [(g,) for g in gens], ring_frame, spec
    )
    return StandardBasis(
        spec,
        tuple(v[0] for v in live),
        tuple(v[0] for v in elements),
        tuple(combos),
        clean,
        None,
        treated,
    )


# ============================================================================
# Queries on a Standard Basis
# ============================================================================

def ideal_member(f: Poly | Vec, basis: StandardBasis) -> bool:
    """True iff the weak normal form of f against the basis vanishes."""
    target = f if isinstance(f, tuple) else (f,)
    result = mora_divide_vector(target, basis.vectors, basis.vector_frame, basis.spec)
    return vec_is_zero(result.remainder)


def normal_form(f: Poly, basis: StandardBasis) -> tuple[Poly, Poly, bool]:
    """(unit, remainder, reduced) with unit*f - remainder in the ideal."""
    result = mora_divide_vector(
        (f,), basis.vectors, basis.vector_frame, basis.spec, reduce_tail=True
    )
    return result.unit, result.remainder[0], result.reduced


def s_pairs_reduce(basis: StandardBasis) -> bool:
    """Buchberger criterion: every S-pair of the basis reduces to zero."""
    vectors = basis.vectors
    frame = basis.vector_frame
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            s, _ = s_vector(vectors[i], vectors[j], frame, basis.spec)
            if vec_is_zero(s):
                continue
            if not vec_is_zero(mora_divide_vector(s, vectors, frame, basis.spec).remainder):
                return False
    return True


def combinations_hold(basis: StandardBasis) -> bool:
    gens = list(basis.generators) if basis.is_module else [(g,) for g in basis.generators]
    return all(
        combination_holds(v, gens, comb) for v, comb in zip(basis.vectors, basis.combinations)
    )


def generators_reduce(basis: StandardBasis) -> bool:
    return all(ideal_member(g, basis) for g in basis.generators)


def initial_terms(basis: StandardBasis) -> list[tuple[int, tuple[int, ...]]]:
    return [vec_initial(v, basis.vector_frame, basis.spec)[:2] for v in basis.vectors]


def is_measure_basis(gens: Sequence[Poly], spec: RingSpec) -> bool:
    """
    True when the P-leading forms of ``gens`` generate the leading ideal L(I),
    tested by membership of the leading forms of a standard basis of I.
    """
    live = [g for g in gens if g]
    if not live:
        raise DomainError("measure-basis test needs a nonzero generator")
    basis = standard_basis(live, spec)
    leading = standard_basis([leading_form_p(g, spec)[0] for g in live], spec)
    return all(ideal_member(leading_form_p(g, spec)[0], leading) for g in basis.elements)

