import pytest
from fastapi.testclient import TestClient

from web_server import app


@pytest.fixture
def client(monkeypatch):
    monkeypatch.delenv("DFRC_TRACKER_CONFIG", raising=False)
    return TestClient(app)


def test_index(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "DFRC Tracker" in response.text
    assert "n_tx" in response.text


def test_config(client):
    data = client.get("/api/config").json()
    assert data["n_tx"] == 64
    assert data["theta0_deg"] == 9.2


def test_trial(client):
    response = client.post("/api/trial", json={"scheme": "dfrc", "index": 1, "overrides": {"epochs": 5}})
    assert response.status_code == 200
    data = response.json()
    assert data["trial"] == 1
    assert len(data["records"]) == 5
    assert data["records"][0]["theta_est_deg"] == pytest.approx(9.2)


def test_trial_unknown_scheme(client):
    assert client.post("/api/trial", json={"scheme": "sonar"}).status_code == 400


def test_run(client):
    body = {"overrides": {"trials": 2, "epochs": 5, "n_antennas": 16}}
    response = client.post("/api/run", json=body)
    assert response.status_code == 200
    summary = response.json()["summary"]
    assert summary["config_echo"]["n_rx"] == 16
    assert set(summary["per_scheme"]) == {"dfrc", "feedback"}


def test_run_rejects_unknown_key(client):
    response = client.post("/api/run", json={"overrides": {"trails": 2}})
    assert response.status_code == 400
    assert "trails" in response.json()["detail"]


def test_run_with_artifacts(client, tmp_path, monkeypatch):
    monkeypatch.setenv("DFRC_TRACKER_OUT", str(tmp_path))
    body = {"overrides": {"trials": 1, "epochs": 3}, "out_dir": "run1"}
    response = client.post("/api/run", json=body)
    assert response.status_code == 200
    assert (tmp_path / "run1" / "trace.csv").exists()
    assert set(response.json()["artifacts"]) == {"trace", "summary"}


@pytest.mark.parametrize("out_dir", ["../escape", "/etc", "run1/../../escape"])
def test_run_out_dir_outside_output_root(client, tmp_path, monkeypatch, out_dir):
    monkeypatch.setenv("DFRC_TRACKER_OUT", str(tmp_path / "root"))
    body = {"overrides": {"trials": 1, "epochs": 3}, "out_dir": out_dir}
    response = client.post("/api/run", json=body)
    assert response.status_code == 400
    assert "out_dir" in response.json()["detail"]
    assert not (tmp_path / "escape").exists()
