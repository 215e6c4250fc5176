from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from app.dependencies.external.store.store import ResolutionStore
from app.dependencies.internal.coeffring import RingSpec
from app.dependencies.internal.poly import parse_poly
from app.dependencies.internal.resolution import free_resolution
from app.main import app
from app.routers.dependencies import get_store

DATA_DIR = Path(__file__).resolve().parent.parent / "app" / "data"


def polys(spec: RingSpec, *texts: str):
    return [parse_poly(t, spec) for t in texts]


@pytest.fixture(scope="session")
def spec_xy() -> RingSpec:
    return RingSpec(("x", "y"), 2)


@pytest.fixture(scope="session")
def example_ideal(spec_xy):
    """The running example (x^2 + y^2, xy, y^3)."""
    return polys(spec_xy, "x^2 + y^2", "x*y", "y^3")


@pytest.fixture(scope="session")
def example_resolution(spec_xy, example_ideal):
    return free_resolution(example_ideal, spec_xy)


@pytest.fixture(scope="session")
def koszul_resolution(spec_xy):
    return free_resolution(polys(spec_xy, "x", "y"), spec_xy)


@pytest.fixture
def store(tmp_path) -> ResolutionStore:
    return ResolutionStore(tmp_path / "store")


@pytest.fixture
def strict_settings(monkeypatch):
    from app.dependencies.external.store import settings

    monkeypatch.setattr(settings, "check_identities", True)
    return settings


@pytest.fixture
def client(store):
    app.dependency_overrides[get_store] = lambda: store
    yield TestClient(app)
    app.dependency_overrides.clear()


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def corpus():
    return {path.stem: path for path in DATA_DIR.glob("*.lr")}
