"""HTTP surface: schemas, values, and error mapping."""
import numpy as np
import pytest
from fastapi.testclient import TestClient

from h3bundle.serialize import TRAJECTORY_COLUMNS
from h3bundle.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def test_healthz(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok" and body["version"]


def test_base_geodesic_straight_line(client):
    resp = client.post(
        "/geodesic/base", json={"u": 1.0, "v": 0.0, "w": 0.0, "t_max": 2.0, "step": 1e-3}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["max_gap"] < 1e-12
    rows = body["closed_form"]["rows"]
    assert body["closed_form"]["columns"] == list(TRAJECTORY_COLUMNS)
    last = rows[-1]
    assert abs(last[0] - 2.0) < 1e-12  # t
    assert abs(last[1] - 2.0) < 1e-12  # x1 = u t
    assert all(abs(c) < 1e-12 for c in last[2:7])  # x2, x3 and the zero fiber
    assert max(body["residual_max"].values()) < 1e-8


def test_base_geodesic_winding_params(client):
    resp = client.post(
        "/geodesic/base", json={"u": 1.0, "v": 2.0, "w": 0.5, "t_max": 2.0, "step": 1e-3}
    )
    body = resp.json()
    assert body["max_gap"] < 1e-6
    assert max(body["residual_max"].values()) < 1e-8


def test_bundle_geodesic_fiber_line(client):
    resp = client.post(
        "/geodesic/bundle",
        json={"l": 1.0, "m": 2.0, "n": 3.0, "t_max": 2.0, "step": 1e-3},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert max(body["residual_max"].values()) < 1e-12
    last = body["trajectory"]["rows"][-1]
    assert np.abs(np.array(last[4:7]) - [2.0, 4.0, 6.0]).max() < 1e-12
    assert body["lagrangian_rel_drift"] < 1e-12


def test_bundle_geodesic_candidate_family_values(client):
    resp = client.post(
        "/geodesic/bundle",
        json={"u": 1.0, "v": 2.0, "l": 3.0, "t_max": 1.0, "step": 1e-3},
    )
    body = resp.json()
    # the integrated flow keeps the base on the straight line (zero-section
    # launch) but the fiber turns inside the parallel gauge, so it leaves the
    # candidate (lt, 0, -l v t^2) family
    last = body["trajectory"]["rows"][-1]
    assert abs(last[1] - 1.0) < 1e-10 and abs(last[2] - 2.0) < 1e-10
    candidate_y = np.array([3.0, 0.0, -6.0])
    assert np.abs(np.array(last[4:7]) - candidate_y).max() > 0.1
    assert body["lagrangian_rel_drift"] < 1e-10


def test_lift_natural_geodesic(client):
    resp = client.post(
        "/lift",
        json={"kind": "natural", "u": 1.0, "v": 2.0, "w": 0.5,
              "t_max": 2.0, "step": 2e-4, "tol": 1e-6},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["is_geodesic"] is True
    assert max(body["residual_max"].values()) < 1e-6


def test_lift_horizontal_with_fiber(client):
    resp = client.post(
        "/lift",
        json={"kind": "horizontal", "u": 1.0, "v": 2.0, "w": 0.5,
              "y0": [0.3, -0.2, 0.4], "t_max": 2.0, "step": 1e-3, "tol": 1e-6},
    )
    body = resp.json()
    assert body["is_geodesic"] is True
    first = body["trajectory"]["rows"][0]
    assert np.abs(np.array(first[4:7]) - [0.3, -0.2, 0.4]).max() < 1e-15


def test_check_distribution_endpoint(client):
    resp = client.post("/distributions/check", json={"name": "htm", "samples": 30})
    assert resp.status_code == 200
    body = resp.json()
    assert body["totally_geodesic"]["verdict"] == "pass"
    assert body["isocline"]["verdict"] == "pass"

    resp = client.post("/distributions/check", json={"name": "ker-omega-v", "samples": 30})
    body = resp.json()
    assert body["totally_geodesic"]["verdict"] == "fail"
    assert abs(body["totally_geodesic"]["witness"]["residual"] - 1.0) < 1e-12
    assert body["isocline"] is None
    assert body["isocline_skipped"] == "not totally geodesic"
    witness = body["totally_geodesic"]["witness"]["point"]
    assert set(witness) == {"x", "y"} and len(witness["x"]) == 3


def test_check_unknown_distribution_404(client):
    resp = client.post("/distributions/check", json={"name": "nope"})
    assert resp.status_code == 404
    assert "unknown distribution" in resp.json()["detail"]


def test_invalid_request_rejected(client):
    resp = client.post("/distributions/check", json={"name": "htm", "samples": 0})
    assert resp.status_code == 422
    resp = client.post("/geodesic/base", json={"u": 1.0, "step": -1.0})
    assert resp.status_code == 422


def test_verify_endpoint_reports_honestly(client):
    resp = client.post("/verify", json={})
    assert resp.status_code == 200
    body = resp.json()
    for name in ("prop3", "prop4", "prop5", "thm-lifts", "thm-fiber", "thm-special"):
        assert name in body["checks"]
    assert body["checks"]["prop3"]["verdict"] == "pass"
    assert body["checks"]["thm-lifts"]["verdict"] == "pass"
    assert body["checks"]["thm-fiber"]["verdict"] == "pass"
    # the straight-line candidate family is not a solution of the system, and
    # the report says so instead of smoothing it over
    assert body["checks"]["thm-special"]["verdict"] == "fail"
    assert body["exit_code"] == 1
    assert "thm-special" in body["failures"]
