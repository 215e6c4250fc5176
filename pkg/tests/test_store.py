import pytest

from app.dependencies.external.store.store import ResolutionDocument, from_document, to_document
from app.dependencies.internal.errors import JobParseError
from app.dependencies.internal.resolution import composites_vanish, degree_compatible

from .conftest import DATA_DIR


def test_saved_resolution_loads_back(store, example_resolution, spec_xy):
    path = store.save("example", example_resolution)
    assert path.name == "example.json"
    loaded = store.load("example")
    assert loaded.ranks == example_resolution.ranks
    assert [s.matrix for s in loaded.steps] == [s.matrix for s in example_resolution.steps]
    assert [s.col_marks for s in loaded.steps] == [s.col_marks for s in example_resolution.steps]
    assert loaded.frame(2).marks(spec_xy) == example_resolution.marks(2)


def test_document_uses_camel_case_keys(example_resolution):
    body = to_document(example_resolution).model_dump(by_alias=True)
    assert body["schemaVersion"] == 1
    assert set(body["steps"][0]) == {"matrix", "colMarks", "rowMarks"}


def test_corrupted_document_fails_verification():
    doc = ResolutionDocument.model_validate_json((DATA_DIR / "corrupted_resolution.json").read_text())
    res = from_document(doc)
    assert not composites_vanish(res)
    assert degree_compatible(res)


def test_missing_and_malformed_documents(store, tmp_path):
    with pytest.raises(JobParseError):
        store.load("nothing-here")
    broken = tmp_path / "broken.json"
    broken.write_text('{"schemaVersion": 1}')
    with pytest.raises(JobParseError):
        store.load(str(broken))
