from app.dependencies.internal.jobs import COMMANDS

RING = "ring { vars=[x,y]; center=[x,y]; field=Q; }\n"
EXAMPLE = RING + "ideal I = [x^2 + y^2, x*y, y^3]\nelement w = x^2 + y^2\n"


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


def test_resolve_over_http(client):
    response = client.post("/api/v1/jobs", json={"job": EXAMPLE, "command": "resolve"})
    assert response.status_code == 200
    body = response.json()
    assert body["schemaVersion"] == 1
    assert body["results"]["ranks"] == [1, 3, 2]
    assert all(a["passed"] for a in body["attestations"])


def test_options_and_oracle(client):
    response = client.post(
        "/api/v1/jobs",
        json={"job": EXAMPLE, "command": "twist-check", "options": {"r": 2, "cap": 10}, "oracle": True},
    )
    assert response.status_code == 200
    assert response.json()["results"]["oracle"]["rank_agreement"] is True


def test_save_goes_to_the_injected_store(client, store):
    response = client.post(
        "/api/v1/jobs",
        json={"job": EXAMPLE, "command": "resolve", "options": {"save": "api"}},
    )
    assert response.status_code == 200
    assert store.path_for("api").exists()


def test_sod_without_a_job(client):
    response = client.post("/api/v1/jobs", json={"command": "sod", "options": {"n": 4, "c": 4, "d": 1}})
    assert response.status_code == 200
    assert response.json()["results"]["pieces"] == [-2, -1]


def test_parse_error_is_400(client):
    response = client.post("/api/v1/jobs", json={"job": RING + "ideal I = []\n", "command": "std"})
    assert response.status_code == 400
    detail = response.json()["detail"]
    assert detail["code"] == "parse"
    assert detail["details"]["line"] == 2


def test_unknown_command_is_400(client):
    response = client.post("/api/v1/jobs", json={"job": EXAMPLE, "command": "factorize"})
    assert response.status_code == 400


def test_precondition_is_422(client):
    response = client.post("/api/v1/jobs", json={"command": "sod", "options": {"n": 3, "c": 4, "d": 1}})
    assert response.status_code == 422
    assert response.json()["detail"]["code"] == "precondition"


def test_request_validation(client):
    response = client.post("/api/v1/jobs", json={"job": EXAMPLE})
    assert response.status_code == 422


def test_list_commands(client):
    response = client.get("/api/v1/jobs/commands")
    assert response.status_code == 200
    body = response.json()
    assert body["total"] == len(COMMANDS) == 11
    sod = next(c for c in body["commands"] if c["name"] == "sod")
    assert sod["needs_job"] is False
    assert set(sod["options"]["properties"]) == {"n", "c", "d"}


def test_startup_creates_the_store_directory(tmp_path, monkeypatch):
    from fastapi.testclient import TestClient

    from app.dependencies.external.store import settings
    from app.main import app

    target = tmp_path / "fresh-store"
    monkeypatch.setattr(settings, "store_dir", str(target))
    with TestClient(app) as client:
        assert client.get("/health").status_code == 200
    assert target.is_dir()


def test_no_browser_origin_is_allowed_by_default(client):
    response = client.get("/health", headers={"Origin": "http://localhost:3000"})
    assert response.status_code == 200
    assert "access-control-allow-origin" not in response.headers


def test_cors_origins_come_from_the_environment(monkeypatch):
    from app.dependencies.external.store.settings import EngineSettings

    monkeypatch.setenv("LOCALRES_CORS_ORIGINS", '["https://notebook.example"]')
    assert EngineSettings(_env_file=None).cors_origins == ["https://notebook.example"]


def test_huge_exponent_hits_the_ceiling(client):
    job = RING + "ideal I = [x, y]\nelement f = (1 + x + y)^400\n"
    response = client.post("/api/v1/jobs", json={"job": job, "command": "divide"})
    assert response.status_code == 503
    assert response.json()["detail"]["code"] == "resource_ceiling"
