from collections import Counter

import pytest

from app.dependencies.internal.coeffring import RingSpec
from app.dependencies.internal.errors import DimensionError, PreconditionError
from app.dependencies.internal.poly import zero_vec
from app.dependencies.internal.resolution import (
    columns_are_standard,
    composites_vanish,
    degree_compatible,
    euler_check,
    free_resolution,
    leading_complex,
    leading_consistency,
    minimize_resolution,
    schreyer_syzygy,
    twist_exactness_check,
    twist_lift,
)

from .conftest import polys


def test_example_resolution_shape(spec_xy, example_resolution):
    res = example_resolution
    assert res.ranks == (1, 3, 2)
    assert res.length == 1
    assert res.marks(1) == (2, 2, 3)
    assert res.marks(2) == (3, 4)
    assert composites_vanish(res)
    assert degree_compatible(res)
    assert columns_are_standard(res)
    assert res.steps[1].matrix.to_strings(spec_xy) == [["y", "0"], ["-x", "y^2"], ["-1", "-x"]]


def test_koszul_resolution(spec_xy, koszul_resolution):
    res = koszul_resolution
    assert res.ranks == (1, 2, 1)
    assert res.marks(2) == (2,)
    assert res.steps[1].matrix.to_strings(spec_xy) == [["y"], ["-x"]]


def test_euler_characteristic_matches_standard_monomials(example_resolution):
    verdicts = euler_check(example_resolution, 10)
    assert verdicts is not None
    assert all(verdicts.values())


def test_euler_check_needs_full_center():
    spec = RingSpec(("x", "y", "z"), 2)
    res = free_resolution(polys(spec, "x", "y"), spec)
    assert euler_check(res, 4) is None


def test_three_variable_resolution_terminates():
    spec = RingSpec(("x", "y", "z"), 3)
    res = free_resolution(polys(spec, "x", "y", "z"), spec)
    assert res.ranks == (1, 3, 3, 1)
    assert composites_vanish(res)


@pytest.mark.parametrize(
    "generators",
    [
        ("x^2 + y^2", "x*y", "y^3"),
        ("x^2 + y^3", "x*y^2", "y^5"),
        ("x", "y"),
    ],
)
def test_leading_complex_matches_leading_forms(spec_xy, generators):
    res = free_resolution(polys(spec_xy, *generators), spec_xy)
    lead = leading_complex(res)
    assert composites_vanish(lead)
    same, other = leading_consistency(res)
    assert same
    assert other.ranks == res.ranks


def test_minimization_prunes_unit_entries(example_resolution):
    small = minimize_resolution(example_resolution)
    assert small.minimized
    assert small.ranks == (1, 2, 1)
    assert composites_vanish(small)
    with pytest.raises(PreconditionError):
        twist_exactness_check(small, 0, 4)


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_twisted_exactness_on_the_example(example_resolution, r):
    report = twist_exactness_check(example_resolution, r, 10, oracle=True)
    assert report.success
    assert all(check.success for pos in report.positions for check in pos.lifts)
    assert report.oracle["applicable"]
    assert report.oracle["rank_agreement"]


@pytest.mark.parametrize("r", [0, 1, 2, 3])
def test_twisted_exactness_on_koszul(koszul_resolution, r):
    report = twist_exactness_check(koszul_resolution, r, 10, oracle=True)
    assert report.success
    assert report.oracle["rank_agreement"]
    assert report.oracle["euler"]


def test_lift_checks_cover_every_monomial_up_to_the_cap(koszul_resolution):
    report = twist_exactness_check(koszul_resolution, 4, 4)
    kinds = Counter(check.kind for check in report.positions[0].lifts)
    # kernel vectors nu * F_1(e_1) with ord(nu) = 0..4, one per monomial
    assert kinds["kernel_below_twist"] == 1 + 2
    assert kinds["kernel"] == 3 + 4 + 5
    assert kinds["mixed"] == 15
    assert kinds["in_twist"] == 2 * 4
    assert all(check.success for check in report.positions[0].lifts)


def test_oracle_is_skipped_over_finite_fields():
    spec = RingSpec(("x", "y"), 2, 7)
    res = free_resolution(polys(spec, "x", "y"), spec)
    report = twist_exactness_check(res, 1, 4, oracle=True)
    assert report.oracle["applicable"] is False


def test_twist_lift_of_zero_succeeds(spec_xy, koszul_resolution):
    outcome = twist_lift(koszul_resolution, 1, zero_vec(spec_xy, 1), 2)
    assert outcome.success


def test_twist_lift_rejects_wrong_rank(spec_xy, koszul_resolution):
    with pytest.raises(DimensionError):
        twist_lift(koszul_resolution, 1, zero_vec(spec_xy, 3), 0)


def test_unit_ideal_resolves_trivially(spec_xy):
    res = free_resolution(polys(spec_xy, "1 + x", "y"), spec_xy)
    assert composites_vanish(res)


def test_schreyer_syzygy_reproduces_the_next_map(spec_xy, example_resolution):
    first, second = example_resolution.steps
    nxt = schreyer_syzygy(first, spec_xy, 1)
    assert nxt.matrix == second.matrix
    assert nxt.col_marks == second.col_marks
    assert schreyer_syzygy(second, spec_xy, 2) is None


@pytest.mark.parametrize("center", [3, 2])
def test_oracle_rank_matches_the_graded_map(center):
    from app.dependencies.internal import linalg

    spec = RingSpec(("x", "y", "z"), center)
    leading = leading_complex(free_resolution(polys(spec, "x*z + y^2", "x*y"), spec))
    for step in leading.steps:
        for degree in range(7):
            dm, _, _ = linalg.graded_map(step.matrix, step.col_marks, step.row_marks, degree, spec)
            expected = linalg.rank(dm)
            assert linalg.oracle_rank(step.matrix, step.col_marks, step.row_marks, degree, spec) == expected


def test_oracle_rank_does_not_use_the_main_path(monkeypatch, example_resolution):
    from app.dependencies.internal import linalg

    def refuse(*args, **kwargs):
        raise AssertionError("main path used")

    monkeypatch.setattr(linalg, "graded_map", refuse)
    monkeypatch.setattr(linalg, "DomainMatrix", refuse)
    step = leading_complex(example_resolution).steps[0]
    assert linalg.oracle_rank(step.matrix, step.col_marks, step.row_marks, 3, example_resolution.spec) == 4
