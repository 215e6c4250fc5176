from itertools import permutations
import random

import pytest

from app.dependencies.internal.coeffring import RingSpec
from app.dependencies.internal.errors import ResourceCeilingError
from app.dependencies.internal.linalg import monomials_of_degree
from app.dependencies.internal.localdiv import (
    division_holds,
    local_basis_preprocess,
    mora_divide,
)
from app.dependencies.internal.poly import constant_term, divides, format_poly, initial, parse_poly
from app.dependencies.internal.stdbasis import standard_basis

from .conftest import polys


def _random_poly(rng: random.Random, spec: RingSpec, max_terms: int = 4):
    body = {}
    for _ in range(rng.randint(1, max_terms)):
        while True:
            m = tuple(rng.randint(0, 3) for _ in range(spec.n))
            if sum(m) <= 6:
                break
        body[m] = rng.choice([-3, -2, -1, 1, 2, 5])
    return spec.ring.from_dict(body)


def _random_form(rng: random.Random, spec: RingSpec, degree: int, max_terms: int = 3):
    pool = monomials_of_degree(spec.n, degree)
    return spec.ring.from_dict({rng.choice(pool): rng.choice([-2, -1, 1, 3]) for _ in range(max_terms)})


def _initial_is_reduced(result, divisors, spec) -> bool:
    if not result.remainder:
        return True
    lead = initial(result.remainder, spec)[1]
    return not any(divides(initial(g, spec)[1], lead) for g in divisors if g)


def _fully_reduced(result, divisors, spec) -> bool:
    initials = [initial(g, spec)[1] for g in divisors if g]
    return not any(divides(i, m) for m in result.remainder.keys() for i in initials)


# ============================================================================
# Weak Normal Form
# ============================================================================

def test_division_identity_on_the_example(spec_xy, example_ideal):
    f = parse_poly("x^3 + x*y^2 + y^4", spec_xy)
    result = mora_divide(f, example_ideal, spec_xy)
    assert division_holds(f, example_ideal, result)
    assert constant_term(result.unit) == 1
    assert not result.remainder


def test_unit_appears_when_dividing_by_a_non_monomial(spec_xy):
    f = parse_poly("x", spec_xy)
    g = parse_poly("x - x^2", spec_xy)
    result = mora_divide(f, [g], spec_xy)
    assert not result.remainder
    assert format_poly(result.unit, spec_xy) == "1 - x"
    assert division_holds(f, [g], result)


def test_random_divisions_are_sound():
    rng = random.Random(2024)
    names = ("x", "y", "z")
    for _ in range(1000):
        n = rng.randint(1, 3)
        spec = RingSpec(names[:n], rng.randint(1, n))
        f = _random_poly(rng, spec)
        divisors = [_random_poly(rng, spec, 3) for _ in range(rng.randint(1, 3))]
        result = mora_divide(f, divisors, spec)
        assert division_holds(f, divisors, result)
        assert constant_term(result.unit) == 1
        assert _initial_is_reduced(result, divisors, spec)
        assert result.reduced == _fully_reduced(result, divisors, spec)


def test_step_ceiling_is_enforced(monkeypatch, spec_xy):
    from app.dependencies.external.store import settings

    monkeypatch.setattr(settings, "step_ceiling", 1)
    f = parse_poly("x^4 + x^3*y + x^2*y^2 + x*y^3", spec_xy)
    with pytest.raises(ResourceCeilingError):
        mora_divide(f, polys(spec_xy, "x^2 + y^2", "x*y"), spec_xy)


# ============================================================================
# Tail Reduction
# ============================================================================

def test_remainder_keeps_terms_outside_the_initial_ideal(spec_xy):
    f = parse_poly("x^2 + y", spec_xy)
    g = parse_poly("x^2", spec_xy)
    result = mora_divide(f, [g], spec_xy)
    assert format_poly(result.remainder, spec_xy) == "y"
    assert result.reduced
    assert _fully_reduced(result, [g], spec_xy)


def test_tail_needing_a_non_trivial_unit(spec_xy):
    # (1 - y/2)(1 + y) = 1/2 * (y - y^2) + 1
    f = parse_poly("1 + y", spec_xy)
    g = parse_poly("y - y^2", spec_xy)
    result = mora_divide(f, [g], spec_xy)
    assert result.reduced
    assert format_poly(result.remainder, spec_xy) == "1"
    assert division_holds(f, [g], result)


def test_tail_without_a_reduced_remainder(spec_xy):
    # any reduced remainder r lies in k[y]; x = 1 forces r = 0, then x = 0 forces u(0) = 0
    f = parse_poly("y - x*y", spec_xy)
    g = parse_poly("x - x^2", spec_xy)
    result = mora_divide(f, [g], spec_xy)
    assert not result.reduced
    assert format_poly(result.remainder, spec_xy) == "y - x*y"
    assert division_holds(f, [g], result)


def test_homogeneous_divisors_always_reduce_fully():
    rng = random.Random(7)
    names = ("x", "y", "z")
    for _ in range(300):
        n = rng.randint(1, 3)
        spec = RingSpec(names[:n], n)
        f = _random_poly(rng, spec)
        divisors = [_random_form(rng, spec, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        result = mora_divide(f, divisors, spec)
        assert result.reduced
        assert _fully_reduced(result, divisors, spec)
        assert result.unit == spec.ring.one
        assert division_holds(f, divisors, result)


def test_remainder_does_not_depend_on_the_basis_order(spec_xy, example_ideal):
    basis = list(standard_basis(example_ideal, spec_xy).elements)
    rng = random.Random(19)
    for _ in range(20):
        f = _random_poly(rng, spec_xy)
        remainders = set()
        for order in permutations(basis):
            result = mora_divide(f, list(order), spec_xy)
            assert result.reduced
            remainders.add(format_poly(result.remainder, spec_xy))
        assert len(remainders) == 1


# ============================================================================
# Local Bases
# ============================================================================

def test_local_basis_preprocess_clears_tails(spec_xy):
    gens = polys(spec_xy, "x + y^2", "y^2")
    basis = local_basis_preprocess(gens, spec_xy)
    assert basis.is_local_basis
    initials = [initial(g, spec_xy)[1] for g in basis.elements]
    for g in basis.elements:
        for monom in list(g.keys()):
            if monom != initial(g, spec_xy)[1]:
                assert not any(divides(i, monom) for i in initials)


def test_local_basis_preprocess_drops_a_divisible_tail(spec_xy):
    basis = local_basis_preprocess(polys(spec_xy, "x^2 + y^3", "y^3"), spec_xy)
    assert [format_poly(g, spec_xy) for g in basis.elements] == ["x^2", "y^3"]
    assert basis.is_local_basis
