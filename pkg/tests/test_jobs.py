import json

import pytest

from app.dependencies.internal.errors import DimensionError, JobParseError, PreconditionError
from app.dependencies.internal.jobs import parse_job, reports_to_json, run_all, run_job

from .conftest import DATA_DIR

RING = "ring { vars=[x,y]; center=[x,y]; field=Q; }\n"


@pytest.fixture(scope="module")
def example_job():
    return parse_job((DATA_DIR / "example.lr").read_text())


@pytest.fixture(scope="module")
def koszul_job():
    return parse_job((DATA_DIR / "koszul.lr").read_text())


# ============================================================================
# Parsing
# ============================================================================

def test_corpus_file_declares_the_example_ideal(example_job):
    assert len(example_job.ideals["I"]) == 3
    assert set(example_job.elements) == {"w", "f"}
    assert example_job.runs[0].command == "std"
    assert example_job.runs[0].options == {"ideal": "G"}


def test_run_directive_options():
    job = parse_job(RING + "ideal I = [x, y]\nrun twist-check r=2 cap=10  # comment\nrun resolve\n")
    assert [(d.command, d.options) for d in job.runs] == [
        ("twist-check", {"r": "2", "cap": "10"}),
        ("resolve", {}),
    ]
    assert job.runs[1].line == 4


@pytest.mark.parametrize(
    "text, line",
    [
        (RING + "ideal I = []\n", 2),
        (RING + "ideal I = [x]\nelement I = y\n", 3),
        ("ideal I = [x]\n", 1),
        (RING + "ideal I = [x, y]\nbogus J = [x]\n", 3),
        (RING + "matrix A = [[x, y], [x]]\n", 2),
    ],
)
def test_parse_errors_carry_positions(text, line):
    with pytest.raises(JobParseError) as info:
        parse_job(text)
    assert info.value.line == line
    assert info.value.code == "parse"


def test_undeclared_variable_points_at_the_polynomial():
    with pytest.raises(JobParseError) as info:
        parse_job(RING + "element f = x + z\n")
    assert (info.value.line, info.value.column) == (2, 13)


def test_center_is_moved_to_the_front():
    job = parse_job("ring { vars=[x,y,z]; center=[y,z]; }\nideal I = [y]\n")
    assert job.spec.names == ("y", "z", "x")
    assert job.spec.c == 2
    assert job.warnings


def test_finite_fields():
    assert parse_job("ring { vars=[x]; field=Fp 7; }\n").spec.characteristic == 7
    with pytest.raises(JobParseError):
        parse_job("ring { vars=[x]; field=Fp 4; }\n")
    with pytest.raises(JobParseError):
        parse_job("ring { vars=[x]; field=R; }\n")


# ============================================================================
# Running
# ============================================================================

def test_std_report(example_job):
    report = run_job(example_job, "std")
    assert report.command == "std"
    assert report.inputs["ideal"]["name"] == "G"
    assert len(report.results["basis"]) == 3
    assert report.results["measureBasis"] is True
    assert report.passed


def test_divide_report(example_job):
    report = run_job(example_job, "divide")
    assert report.results["remainder"] == "0"
    assert report.passed


def test_resolve_report_and_store(example_job, store):
    report = run_job(example_job, "resolve", {"save": "ex"}, oracle=True, store=store)
    assert report.results["ranks"] == [1, 3, 2]
    assert report.results["steps"][1]["colMarks"] == [3, 4]
    assert report.passed
    assert {a.name for a in report.attestations} >= {"composites_vanish", "columns_standard"}

    loaded = run_job(example_job, "twist-check", {"load": "ex", "r": 1}, store=store)
    assert loaded.passed
    assert loaded.inputs["stored"]["name"] == "ex"


def test_twist_check_report(koszul_job):
    report = run_job(koszul_job, "twist-check", {"r": 2}, oracle=True)
    assert report.results["r"] == 2
    assert report.results["oracle"]["rank_agreement"] is True
    assert report.passed


def test_matfac_report(koszul_job):
    report = run_job(koszul_job, "matfac")
    mf = report.results["matrixFactorization"]
    assert mf["A"] == [["x", "y"], ["y", "-x"]]
    assert mf["w"] == "x^2 + y^2"
    assert report.passed


def test_identity_checks_inside_the_engine(koszul_job, strict_settings):
    report = run_job(koszul_job, "matfac", {"element": "v"})
    assert strict_settings.check_identities
    assert report.passed


def test_standard_resolution_report(koszul_job):
    report = run_job(koszul_job, "std-res-s", oracle=True)
    assert report.results["resolution"]["tailStart"] == 2
    assert report.passed


def test_complete_intersection_report(koszul_job):
    report = run_job(koszul_job, "ci-matfac")
    assert report.inputs["w1"]["value"] == "x^2"
    assert report.results["projection"]["w"] == "x^2 + y^2"
    assert report.passed


def test_periodicity_report():
    job = parse_job(RING)
    report = run_job(job, "periodicity", {"a": 3, "b": 4})
    unperturbed, perturbed = report.results["instances"]
    assert (unperturbed["a"], unperturbed["b"]) == ([1, 1], [3, 2])
    assert perturbed["feasible"] is False
    assert perturbed["cycleWeight"] < 0
    assert report.passed


def test_periodicity_from_raw_valuations():
    job = parse_job(RING)
    raw = json.dumps({"valA": [[1, None], [None, 1]], "valB": [[1, None], [None, 1]], "d": 2})
    report = run_job(job, "periodicity", {"valuations": raw})
    (entry,) = report.results["instances"]
    assert entry["label"] == "raw"
    assert entry["instance"] == {"aVal": [[1, None], [None, 1]], "bVal": [[1, None], [None, 1]], "d": 2}
    assert report.inputs["valuations"]["d"] == 2
    assert report.passed


@pytest.mark.parametrize(
    "raw, error",
    [
        ('{"valA": [[1, 1]], "valB": [[1]], "d": 2}', DimensionError),
        ('{"valA": [[1]], "valB": [[1]], "d": 0}', JobParseError),
        ('{"valA": [[-1]], "valB": [[1]], "d": 2}', JobParseError),
        ("not json", JobParseError),
    ],
)
def test_raw_valuations_are_validated(raw, error):
    with pytest.raises(error):
        run_job(parse_job(RING), "periodicity", {"valuations": raw})



def test_periodicity_needs_something_to_decide():
    with pytest.raises(PreconditionError):
        run_job(parse_job(RING), "periodicity")


def test_sod_needs_no_job():
    report = run_job(None, "sod", {"n": 4, "c": 4, "d": 1})
    assert report.results["pieces"] == [-2, -1]
    assert report.results["pieceLabels"] == ["O_E(-2)", "O_E(-1)"]


def test_proj_report(koszul_job):
    report = run_job(koszul_job, "proj")
    assert report.results["positions"][0]["twists"] == [{"twist": 1, "multiplicity": 2}]
    assert report.passed


@pytest.mark.parametrize(
    "command, options",
    [
        ("twist-check", {"cap": 99}),
        ("resolve", {"colour": "blue"}),
        ("nonsense", {}),
        ("std", {"ideal": "Z"}),
    ],
)
def test_bad_commands_and_options(koszul_job, command, options):
    with pytest.raises(JobParseError):
        run_job(koszul_job, command, options)


def test_commands_other_than_sod_need_a_job():
    with pytest.raises(JobParseError):
        run_job(None, "std")


def test_reports_are_deterministic_without_meta(koszul_job):
    first = run_job(koszul_job, "resolve").to_json()
    second = run_job(koszul_job, "resolve").to_json()
    assert first == second
    assert "meta" not in json.loads(first)
    with_meta = json.loads(run_job(koszul_job, "resolve", meta=True).to_json())
    assert "generatedAt" in with_meta["meta"]


def test_run_all_follows_the_directives():
    job = parse_job((DATA_DIR / "leading.lr").read_text())
    reports = run_all(job)
    assert [r.inputs["ideal"]["name"] for r in reports] == ["I", "J", "K"]
    assert all(r.passed for r in reports)
    assert len(json.loads(reports_to_json(reports))) == 3
