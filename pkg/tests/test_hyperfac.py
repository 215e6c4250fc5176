from dataclasses import replace

import pytest

from app.dependencies.internal.coeffring import RingSpec
from app.dependencies.internal.errors import InsufficientLengthError, PreconditionError
from app.dependencies.internal.hyperfac import (
    MatrixFactorization,
    assemble_block_mf,
    beyond_support_vanishes,
    ci_homotopies,
    ci_projection,
    ci_totalization,
    composites_vanish_mod,
    higher_homotopies,
    homotopy_chain,
    hypersurface_homotopies,
    leading_homotopies,
    multi_indices,
    quotient_exactness,
    relation_residual,
    relations_hold,
    standard_resolution_S,
    tail_matches,
    tail_periodic,
)
from app.dependencies.internal.poly import PolyMatrix, parse_poly
from app.dependencies.internal.resolution import free_resolution, minimize_resolution

from .conftest import polys


def test_multi_indices_order():
    assert multi_indices(1, 2) == [(1,), (2,)]
    assert multi_indices(2, 2) == [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_koszul_factorization_of_x2_plus_y2(spec_xy, koszul_resolution):
    w = parse_poly("x^2 + y^2", spec_xy)
    mf = assemble_block_mf(hypersurface_homotopies(koszul_resolution, w))
    assert mf.size == 2
    assert mf.holds()
    assert mf.A.to_strings(spec_xy) == [["x", "y"], ["y", "-x"]]
    assert mf.B.to_strings(spec_xy) == [["x", "y"], ["y", "-x"]]


@pytest.mark.parametrize(
    "fixture, w, size",
    [
        ("koszul_resolution", "x^2 + y^2", 2),
        ("koszul_resolution", "x^3 + y^3", 2),
        ("example_resolution", "x^2 + y^2", 3),
    ],
)
def test_factorization_identity_and_residuals(request, spec_xy, fixture, w, size):
    res = request.getfixturevalue(fixture)
    system = hypersurface_homotopies(res, parse_poly(w, spec_xy))
    mf = assemble_block_mf(system)
    assert mf.size == size
    assert mf.holds()
    assert relations_hold(system)
    assert beyond_support_vanishes(system)
    assert relation_residual(system, (1,), 0).is_zero()


def test_homotopy_chain_relation(spec_xy, example_resolution):
    w = parse_poly("x^2 + y^2", spec_xy)
    system = homotopy_chain(example_resolution, w)
    K0 = system.K(0)
    F0 = example_resolution.differential(1)
    assert F0 @ K0 == PolyMatrix.identity(spec_xy, 1, w)


def test_higher_homotopies_extend_the_chain(spec_xy, example_resolution):
    chain = homotopy_chain(example_resolution, parse_poly("x^2 + y^2", spec_xy))
    full = higher_homotopies(chain)
    assert full.depth_cap == example_resolution.length
    assert relations_hold(full)
    assert higher_homotopies(full, 0) is full


def test_leading_homotopies_satisfy_the_leading_relations(spec_xy, example_resolution):
    system = hypersurface_homotopies(example_resolution, parse_poly("x^2 + y^2", spec_xy))
    assert relations_hold(leading_homotopies(system))


def test_hypersurface_preconditions(spec_xy, koszul_resolution, example_resolution):
    with pytest.raises(PreconditionError):
        hypersurface_homotopies(koszul_resolution, parse_poly("x", spec_xy))
    with pytest.raises(PreconditionError):
        hypersurface_homotopies(example_resolution, parse_poly("y^2", spec_xy))
    with pytest.raises(PreconditionError):
        hypersurface_homotopies(minimize_resolution(example_resolution), parse_poly("x^2 + y^2", spec_xy))


def test_staircase_parameter_is_bounded(spec_xy, koszul_resolution):
    system = hypersurface_homotopies(koszul_resolution, parse_poly("x^2 + y^2", spec_xy))
    with pytest.raises(InsufficientLengthError):
        assemble_block_mf(system, k_prime=1)
    assert assemble_block_mf(system, k_prime=0).A == assemble_block_mf(system).A


@pytest.fixture(scope="module")
def koszul_xyz():
    spec = RingSpec(("x", "y", "z"), 3)
    res = free_resolution(polys(spec, "x", "y", "z"), spec)
    return hypersurface_homotopies(res, parse_poly("x^2 + y^2 + z^2", spec))


def test_staircase_layers_up_to_k_prime(koszul_xyz):
    shallow = assemble_block_mf(koszul_xyz, k_prime=0)
    deep = assemble_block_mf(koszul_xyz, k_prime=1)
    assert shallow.holds()
    assert (shallow.A, shallow.B) == (deep.A, deep.B)


def test_staircase_refuses_to_drop_a_nonzero_layer(koszul_xyz):
    spec = koszul_xyz.spec
    x = spec.gens[0]
    bent = replace(koszul_xyz, maps={**koszul_xyz.maps, ((2,), 0): PolyMatrix.from_rows(spec, [[x]])})
    with pytest.raises(PreconditionError):
        assemble_block_mf(bent, k_prime=0)


def test_periodic_resolution_over_the_hypersurface(spec_xy, koszul_resolution):
    system = hypersurface_homotopies(koszul_resolution, parse_poly("x^2 + y^2", spec_xy))
    mf = assemble_block_mf(system)
    total = standard_resolution_S(system, 6)
    assert composites_vanish_mod(total)
    assert tail_matches(total, mf)
    assert tail_periodic(total)
    table = quotient_exactness(total, 6)
    assert table is not None
    assert all(ker == im for rows in table.values() for ker, im in rows.values())


def test_signed_totalization_still_composes_to_zero(spec_xy, example_resolution):
    system = hypersurface_homotopies(example_resolution, parse_poly("x^2 + y^2", spec_xy))
    total = standard_resolution_S(system, 5, signed=True)
    assert composites_vanish_mod(total)


def test_complete_intersection_connecting_relation(spec_xy, koszul_resolution):
    x, y = spec_xy.gens
    system = ci_homotopies(koszul_resolution, x**2, y**2)
    K0, K1 = system.sigma((1, 0), 0), system.sigma((1, 0), 1)
    L0, L1 = system.sigma((0, 1), 0), system.sigma((0, 1), 1)
    G0 = system.sigma((1, 1), 0)
    F2 = koszul_resolution.differential(3)
    assert (K1 @ L0 + L1 @ K0 + F2 @ G0).is_zero()
    assert relations_hold(system)


def test_complete_intersection_totalization(spec_xy, koszul_resolution):
    x, y = spec_xy.gens
    system = ci_homotopies(koszul_resolution, x**2, y**2)
    total = ci_totalization(system, 4)
    assert composites_vanish_mod(total)
    table = quotient_exactness(total, 8)
    assert table is not None
    assert all(ker == im for rows in table.values() for ker, im in rows.values())


def test_projection_gives_a_factorization_of_the_sum(spec_xy, koszul_resolution):
    x, y = spec_xy.gens
    system = ci_homotopies(koszul_resolution, x**2, y**2)
    mf = assemble_block_mf(ci_projection(system, spec_xy.ring.one, spec_xy.ring.one))
    assert isinstance(mf, MatrixFactorization)
    assert mf.w == x**2 + y**2
    assert mf.holds()


def test_ci_rejects_common_factor(spec_xy, koszul_resolution):
    x, y = spec_xy.gens
    with pytest.raises(PreconditionError):
        ci_homotopies(koszul_resolution, x**2, x * y)


def test_short_complete_intersection_totalization(spec_xy, koszul_resolution):
    x, y = spec_xy.gens
    system = ci_homotopies(koszul_resolution, x**2, y**2)
    total = ci_totalization(system, 1)
    assert len(total.maps) == 2
    assert [total.term(i).rank for i in (-1, 0, 1)] == [1, 2, 3]
    assert composites_vanish_mod(total)
    with pytest.raises(PreconditionError):
        ci_totalization(system, 0)


def test_standard_resolution_needs_room_for_the_tail(spec_xy, koszul_resolution):
    system = hypersurface_homotopies(koszul_resolution, parse_poly("x^2 + y^2", spec_xy))
    with pytest.raises(PreconditionError):
        standard_resolution_S(system, koszul_resolution.length + 1)
