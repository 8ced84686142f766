import pytest
from fastapi.testclient import TestClient

from catrec.config import RunConfig
from catrec.service import app

from test_pipeline import small_cfg


@pytest.fixture(scope="module")
def client():
    return TestClient(app, raise_server_exceptions=False)


def payload(workdir, cfg=None, **extra):
    return {"workdir": str(workdir), "config": (cfg or RunConfig()).model_dump(), **extra}


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_unknown_payload_key_is_rejected(client, tmp_path):
    body = payload(tmp_path)
    body["surprise"] = True
    assert client.post("/synth", json=body).status_code == 422


def test_missing_artifact_maps_to_404(client, tmp_path):
    response = client.post("/matrices", json=payload(tmp_path))
    assert response.status_code == 404
    assert response.json()["error"] == "missing-artifact"


def test_config_error_maps_to_400(client, tmp_path):
    cfg = RunConfig()
    cfg.synth.blocks = 1
    response = client.post("/synth", json=payload(tmp_path, cfg))
    assert response.status_code == 400
    assert response.json()["error"] == "config"


def test_synth_and_ingest_stages(client, tmp_path):
    cfg = small_cfg()
    response = client.post("/synth", json=payload(tmp_path, cfg))
    assert response.status_code == 200
    assert response.json()["stage"] == "synth"
    assert response.json()["summary"]["records"] > 0

    response = client.post("/ingest", json=payload(tmp_path, cfg))
    assert response.status_code == 200
    summary = response.json()["summary"]
    assert summary["users"] > 0 and summary["categories"] > 0


def test_recommend_unknown_user_is_400(client, tmp_path):
    cfg = small_cfg()
    for stage in ("/synth", "/ingest", "/matrices", "/walk", "/skipgram", "/train-vi"):
        assert client.post(stage, json=payload(tmp_path, cfg)).status_code == 200
    response = client.post("/recommend", json=payload(tmp_path, cfg, user="nobody"))
    assert response.status_code == 400
