from math import comb

import pytest

from app.dependencies.internal.errors import PreconditionError
from app.dependencies.internal.reescalc import (
    RESIDUAL_LABEL,
    GradedComplex,
    graded_complex_from_resolution,
    graded_truncate,
    koszul_graded_complex,
    proj_complex,
    sod_report,
)
from app.dependencies.internal.resolution import free_resolution

from .conftest import polys


def test_sod_pieces_for_three_and_four_dimensions():
    report = sod_report(3, 3, 1)
    assert report.gorenstein_parameter == 2
    assert report.piece_labels == ["O_E(-1)"]
    report = sod_report(4, 4, 1)
    assert report.pieces == (-2, -1)
    assert report.residual_label == RESIDUAL_LABEL


def test_sod_not_applicable_without_positive_parameter():
    report = sod_report(3, 2, 2)
    assert not report.applicable
    assert report.pieces == ()


@pytest.mark.parametrize("c", range(2, 9))
def test_sod_piece_count(c):
    for d in range(1, c):
        report = sod_report(8, c, d)
        assert len(report.pieces) == max(c - d - 1, 0)
        assert list(report.pieces) == sorted(report.pieces)


def test_sod_rejects_bad_parameters():
    with pytest.raises(PreconditionError):
        sod_report(2, 3, 1)
    with pytest.raises(PreconditionError):
        sod_report(3, 2, 0)


def test_proj_complex_of_koszul(koszul_resolution):
    desc = proj_complex(koszul_resolution)
    assert desc.head_twist == 0
    assert [pos.twists for pos in desc.positions] == [((1, 2),), ((2, 1),)]
    assert desc.positions[1].serre_twists == (-2,)


def test_proj_complex_of_the_example(example_resolution):
    desc = proj_complex(example_resolution)
    assert desc.positions[0].twists == ((2, 2), (3, 1))
    for pos, marks in zip(desc.positions, desc.source_marks):
        expanded = sorted(t for t, m in pos.twists for _ in range(m))
        assert expanded == sorted(marks)


def test_proj_complex_rejects_the_unit_ideal(spec_xy):
    res = free_resolution(polys(spec_xy, "1 + x"), spec_xy)
    with pytest.raises(PreconditionError):
        proj_complex(res)


def test_truncation_splits_by_threshold():
    split = graded_truncate(GradedComplex(((0, 1, -2),)), 0)
    assert split.floor == ((0, -2),)
    assert split.ceiling == ((1,),)
    assert split.partitions(GradedComplex(((0, 1, -2),)))


def test_truncation_of_the_koszul_complex():
    gc = koszul_graded_complex(3)
    assert [len(p) for p in gc.positions] == [comb(3, j) for j in range(4)]
    split = graded_truncate(gc, 1)
    assert split.partitions(gc)
    assert [len(p) for p in split.ceiling] == [0, 0, 3, 1]


def test_truncation_of_a_resolution(example_resolution):
    gc = graded_complex_from_resolution(example_resolution)
    split = graded_truncate(gc, 10)
    assert all(not shifts for shifts in split.ceiling)
