"""Service API tests over the in-process ASGI app."""

import pytest
from fastapi.testclient import TestClient

from medgossip.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["service"] == "medgossip"


class TestRunEndpoint:
    def test_default_run_reproduces_full_accuracy(self, client):
        response = client.post("/experiments/run", json={"seed": 42})
        assert response.status_code == 200
        body = response.json()
        assert body["metrics"]["totals"] == {"total": 100, "accepted": 100, "accuracy": 1.0}
        assert body["metrics"]["coverage"]["min"] == 1.0
        assert body["events"] is None
        assert body["config"]["seed"] == 42
        assert body["config"]["h_max"] == 5  # resolved

    def test_seed_is_required(self, client):
        response = client.post("/experiments/run", json={})
        assert response.status_code == 422

    def test_quorum_bound_violation_names_the_rule(self, client):
        response = client.post("/experiments/run", json={"seed": 1, "n": 4, "f": 2})
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert any("3f + 1" in item["msg"] for item in detail)

    def test_trace_returns_event_log(self, client):
        request = {
            "seed": 5,
            "trace": True,
            "workload": {"patient_data": 2, "diagnosis": 0, "treatment_plan": 0, "emergency_alert": 0},
        }
        response = client.post("/experiments/run", json=request)
        events = response.json()["events"]
        assert events
        assert {"time_ms", "type", "actor", "message_id", "detail"} <= set(events[0])
        assert any(e["type"] == "propose" for e in events)

    def test_profiles_change_votes(self, client):
        request = {"seed": 42, "profiles": {"agent-2": "VOTE_FLIPPER"}}
        response = client.post("/experiments/run", json=request)
        assert response.status_code == 200
        assert response.json()["metrics"]["totals"]["accepted"] == 100

    def test_unknown_profile_rejected(self, client):
        request = {"seed": 1, "profiles": {"agent-2": "EVIL"}}
        response = client.post("/experiments/run", json=request)
        assert response.status_code == 422

    def test_unknown_profile_agent_rejected(self, client):
        request = {"seed": 1, "profiles": {"agent-9": "SILENT"}}
        assert client.post("/experiments/run", json=request).status_code == 422

    def test_identical_requests_identical_documents(self, client):
        request = {"seed": 11, "delay": {"kind": "uniform", "lo_ms": 1, "hi_ms": 10}}
        first = client.post("/experiments/run", json=request).json()
        second = client.post("/experiments/run", json=request).json()
        assert first == second


class TestInjectEndpoint:
    def test_detection_is_total(self, client):
        request = {
            "seed": 7,
            "inject": {"bad_signature": 20, "expired_timestamp": 15, "malformed_content": 15},
        }
        response = client.post("/experiments/inject", json=request)
        assert response.status_code == 200
        attacks = response.json()["metrics"]["attack_totals"]
        assert attacks == {"injected": 50, "rejected": 50, "detection_rate": 1.0}

    def test_zero_plan_equals_plain_run(self, client):
        request = {"seed": 3}
        run_doc = client.post("/experiments/run", json=request).json()
        inject_doc = client.post("/experiments/inject", json=request).json()
        assert run_doc == inject_doc

    def test_plan_exceeding_workload_rejected(self, client):
        request = {
            "seed": 1,
            "workload": {"patient_data": 1, "diagnosis": 0, "treatment_plan": 0, "emergency_alert": 0},
            "inject": {"bad_signature": 5, "expired_timestamp": 0, "malformed_content": 0},
        }
        response = client.post("/experiments/inject", json=request)
        assert response.status_code == 422


class TestSweepEndpoint:
    def test_rows_cover_requested_range(self, client):
        request = {"seed": 42, "f_min": 1, "f_max": 3, "fanout": 3}
        response = client.post("/experiments/sweep", json=request)
        assert response.status_code == 200
        body = response.json()
        assert [row["n"] for row in body["rows"]] == [4, 7, 10]
        assert [row["threshold"] for row in body["rows"]] == [3, 5, 7]
        assert len(body["points"]) == 3

    def test_single_point_sweep_matches_run(self, client):
        sweep = client.post("/experiments/sweep", json={"seed": 42, "f_min": 1, "f_max": 1}).json()
        run = client.post("/experiments/run", json={"seed": 42}).json()
        assert sweep["points"][0]["metrics"] == run["metrics"]

    def test_inverted_range_rejected(self, client):
        response = client.post("/experiments/sweep", json={"seed": 1, "f_min": 3, "f_max": 1})
        assert response.status_code == 422
