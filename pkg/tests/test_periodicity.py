import random

import pytest

from app.dependencies.internal.errors import DimensionError, DomainError, PreconditionError
from app.dependencies.internal.hyperfac import (
    MatrixFactorization,
    assemble_block_mf,
    hypersurface_homotopies,
    standard_resolution_S,
)
from app.dependencies.internal.periodicity import (
    PeriodicityInstance,
    batch_scan,
    brute_force_feasible,
    check_asymptotic_periodicity,
    cone_windows,
    constraint_edges,
    instance_from_matrices,
    knorrer_double,
    knorrer_single,
    mf_extension_sum,
    random_instance,
    resolution_certificate,
    shift_certificate,
    tighten_certificate,
    valuation_matrix,
    verify_certificate,
    xab_family,
)
from app.dependencies.internal.poly import PolyMatrix, parse_poly

PAIRS = [(3, 4), (3, 5), (4, 5)]


def _family(spec, a, b, perturbed=False):
    A, B, w = xab_family(a, b, spec, perturbed=perturbed)
    return instance_from_matrices(A, B, w, spec), MatrixFactorization(A, B, w)


@pytest.mark.parametrize("a, b", PAIRS)
def test_unperturbed_pair_is_periodic(spec_xy, a, b):
    inst, mf = _family(spec_xy, a, b)
    assert mf.holds()
    cert = check_asymptotic_periodicity(inst)
    assert cert.feasible
    assert verify_certificate(inst, cert)


@pytest.mark.parametrize("a, b", PAIRS)
def test_perturbed_pair_has_a_negative_cycle(spec_xy, a, b):
    inst, _ = _family(spec_xy, a, b, perturbed=True)
    cert = check_asymptotic_periodicity(inst)
    assert not cert.feasible
    assert cert.cycle_weight < 0
    assert sum(edge.weight for edge in cert.cycle) == cert.cycle_weight
    assert verify_certificate(inst, cert)


def test_known_windows(spec_xy):
    cert = check_asymptotic_periodicity(_family(spec_xy, 3, 4)[0])
    assert (cert.a, cert.b) == ((1, 1), (3, 2))
    cert = check_asymptotic_periodicity(_family(spec_xy, 4, 5)[0])
    assert (cert.a, cert.b) == ((1, 1), (4, 2))


def test_valuations_and_cone_windows(spec_xy):
    M = PolyMatrix.from_rows(spec_xy, [[parse_poly(t, spec_xy) for t in row] for row in [["x", "y^2"], ["0", "x*y"]]])
    assert valuation_matrix(M, spec_xy) == ((1, 2), (None, 2))
    assert cone_windows(((1, None), (0, 2)), [1, 1]) == (2, 1)
    assert cone_windows(((None, None),), [1, 1]) == (None,)


def test_constraint_edges_follow_the_inequalities():
    inst = PeriodicityInstance.from_lists([[1, None], [0, 2]], [[1, 1], [None, 0]], 2)
    edges = {(e.source, e.target): e.weight for e in constraint_edges(inst)}
    assert edges[("a1", "b1")] == 1
    assert ("a2", "b1") not in edges
    assert edges[("b1", "a1")] == -1
    assert edges[("b2", "a2")] == -2


def test_bellman_ford_agrees_with_brute_force():
    rng = random.Random(7)
    for _ in range(200):
        inst = random_instance(rng)
        assert check_asymptotic_periodicity(inst).feasible == brute_force_feasible(inst, 10)


@pytest.mark.parametrize("k", range(6))
def test_certificates_are_shift_invariant(spec_xy, k):
    inst, _ = _family(spec_xy, 3, 5)
    cert = check_asymptotic_periodicity(inst)
    assert verify_certificate(inst, shift_certificate(cert, k))


def test_tightened_windows_still_verify(spec_xy):
    inst, _ = _family(spec_xy, 4, 5)
    tight = tighten_certificate(inst, check_asymptotic_periodicity(inst))
    assert verify_certificate(inst, tight)


@pytest.mark.parametrize("a, b", PAIRS)
def test_knorrer_double_and_extension(spec_xy, a, b):
    inst, _ = _family(spec_xy, a, b)
    cert = check_asymptotic_periodicity(inst)
    double = knorrer_double(inst, cert, 1, 1)
    low, high = double.interval
    assert low <= double.k <= high
    assert double.instance.size == 2 * inst.size
    assert verify_certificate(double.instance, double.certificate)

    zeros = [[0] * inst.size for _ in range(inst.size)]
    none = [[None] * inst.size for _ in range(inst.size)]
    ext = mf_extension_sum(inst, cert, inst, cert, zeros, none)
    assert not ext.any_k
    assert verify_certificate(ext.instance, ext.certificate)


def test_knorrer_single_on_a_one_by_one_factorization(spec_xy):
    x = spec_xy.gens[0]
    A = PolyMatrix.from_rows(spec_xy, [[x]])
    mf = MatrixFactorization(A, -A, -(x**2))
    assert mf.holds()
    inst = instance_from_matrices(mf.A, mf.B, mf.w, spec_xy)
    cert = check_asymptotic_periodicity(inst)
    single = knorrer_single(inst, cert, 1, mf)
    assert single.k == -1
    assert single.certificate.a == (1,)
    assert single.certificate.b == (2,)
    assert verify_certificate(single.instance, single.certificate)


def test_knorrer_single_needs_b_equal_minus_a(spec_xy):
    A, B, w = xab_family(3, 4, spec_xy)
    inst = instance_from_matrices(A, B, w, spec_xy)
    with pytest.raises(PreconditionError):
        knorrer_single(inst, check_asymptotic_periodicity(inst), 1, MatrixFactorization(A, B, w))


def test_instance_validation():
    with pytest.raises(DimensionError):
        PeriodicityInstance.from_lists([[1, 1]], [[1]], 1)
    with pytest.raises(DomainError):
        PeriodicityInstance.from_lists([[-1]], [[1]], 1)
    with pytest.raises(DomainError):
        PeriodicityInstance.from_lists([[1]], [[1]], 0)


def test_batch_scan_covers_the_grid(spec_xy):
    rows = batch_scan(spec_xy, range(3, 5), range(4, 6))
    assert [(row["a"], row["b"]) for row in rows] == [(3, 4), (3, 5), (4, 4), (4, 5)]
    for row in rows:
        assert row["unperturbed"]["feasible"]
        assert row["unperturbed"]["verified"]
        assert row["perturbed"]["verified"]


def test_periodic_resolution_windows_certify_the_tail(spec_xy, koszul_resolution):
    system = hypersurface_homotopies(koszul_resolution, parse_poly("x^2 + y^2", spec_xy))
    total = standard_resolution_S(system, 6)
    mf = assemble_block_mf(system)
    inst, cert = resolution_certificate(total, mf)
    assert cert.feasible
    assert verify_certificate(inst, cert)
