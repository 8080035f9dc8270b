import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore", DeprecationWarning)
    from fastapi.testclient import TestClient

from dfproj import __version__
from dfproj.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "version": __version__}


def test_solve_with_explicit_start(client):
    payload = {
        "problem": {"problem": "4", "n": 6},
        "solver": "scgp",
        "x0": [0.0] * 6,
    }
    response = client.post("/solve", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "converged"
    assert body["iterations"] == 0
    assert body["f_evals"] == 1
    assert body["aa_steps"] == 0
    assert body["x"] == [0.0] * 6

    payload["include_solution"] = False
    body = client.post("/solve", json=payload).json()
    assert body["x"] is None


def test_solve_seeded_start_is_deterministic(client):
    payload = {
        "problem": {"problem": "1", "n": 30},
        "solver": "httcgp",
        "seed": 7,
    }
    first = client.post("/solve", json=payload).json()
    second = client.post("/solve", json=payload).json()
    first.pop("wall_seconds")
    second.pop("wall_seconds")
    assert first == second
    assert first["status"] == "converged"
    assert first["final_residual_norm"] <= 1e-6


def test_solve_accelerated(client):
    payload = {
        "problem": {"problem": "1", "n": 40},
        "solver": "aa-scgp",
    }
    body = client.post("/solve", json=payload).json()
    assert body["status"] == "converged"
    assert body["aa_steps"] > 0


def test_solve_logistic_synth(client):
    payload = {
        "problem": {
            "problem": "logistic",
            "synth": {"m": 40, "n": 8, "seed": 2},
        },
        "solver": "aa-httcgp",
    }
    body = client.post("/solve", json=payload).json()
    assert body["status"] == "converged"
    assert len(body["x"]) == 8


@pytest.mark.parametrize(
    "payload",
    [
        # Start vector of the wrong length.
        {
            "problem": {"problem": "4", "n": 6},
            "solver": "scgp",
            "x0": [0.0] * 5,
        },
        # Unknown solver tag.
        {"problem": {"problem": "4", "n": 6}, "solver": "bfgs"},
        # Numbered problem without a dimension.
        {"problem": {"problem": "4"}, "solver": "scgp"},
        # Logistic problem without data.
        {"problem": {"problem": "logistic"}, "solver": "scgp"},
        # Logistic problem with both data sources.
        {
            "problem": {
                "problem": "logistic",
                "dataset_path": "x.txt",
                "synth": {"m": 5, "n": 5},
            },
            "solver": "scgp",
        },
        # Dataset path that does not exist.
        {
            "problem": {"problem": "logistic", "dataset_path": "/nope/xyz.txt"},
            "solver": "scgp",
        },
        # Bad override key.
        {
            "problem": {"problem": "4", "n": 6},
            "solver": "scgp",
            "overrides": {"ls.nope": 1.0},
        },
    ],
)
def test_solve_domain_errors_are_400(client, payload):
    response = client.post("/solve", json=payload)
    assert response.status_code == 400
    assert response.json()["detail"]


def test_solve_schema_errors_are_422(client):
    response = client.post(
        "/solve", json={"problem": {"problem": "4", "n": 6}}
    )
    assert response.status_code == 422
    response = client.post(
        "/solve",
        json={"problem": {"problem": "4", "n": 6}, "solver": "scgp", "tol": 0.0},
    )
    assert response.status_code == 422
    response = client.post(
        "/solve",
        json={"problem": {"problem": "7", "n": 6}, "solver": "scgp"},
    )
    assert response.status_code == 422


def test_experiments_roundtrip(client):
    payload = {
        "problem": "2",
        "dims": [20],
        "solvers": ["scgp", "aa-scgp"],
        "repeats": 2,
        "seed": 5,
    }
    response = client.post("/experiments", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["all_converged"] is True
    assert [(r["problem"], r["n"], r["solver"]) for r in body["rows"]] == [
        ("P2", 20, "scgp"), ("P2", 20, "aa-scgp")
    ]
    for row in body["rows"]:
        assert row["failures"] == 0
        assert row["mean_final_residual"] <= 1e-6

    # Profiles accept the experiment rows verbatim.
    profile = client.post(
        "/profiles", json={"rows": body["rows"], "metric": "nf"}
    )
    assert profile.status_code == 200
    points = profile.json()["points"]
    assert points
    solvers = {p["solver"] for p in points}
    assert solvers == {"scgp", "aa-scgp"}
    for point in points:
        assert point["theta"] >= 1.0
        assert 0.0 <= point["rho"] <= 1.0
    # Every solver curve ends at the fraction it solved, here everything.
    last_by_solver = {p["solver"]: p["rho"] for p in points}
    assert set(last_by_solver.values()) == {1.0}


def test_experiments_report_failures(client):
    payload = {
        "problem": "logistic",
        "synth": {"m": 30, "n": 8},
        "solvers": ["scgp"],
        "repeats": 2,
        "max_iter": 1,
    }
    body = client.post("/experiments", json=payload).json()
    assert body["all_converged"] is False
    row = body["rows"][0]
    assert row["failures"] == 2
    assert row["mean_iter"] is None
    assert row["mean_final_residual"] is None


def test_experiments_validation(client):
    response = client.post(
        "/experiments",
        json={"problem": "4", "dims": [6], "solvers": ["nope"]},
    )
    assert response.status_code == 400
    response = client.post(
        "/experiments",
        json={"problem": "4", "dims": [6], "solvers": ["scgp"], "repeats": 0},
    )
    assert response.status_code == 422


def test_profiles_validation(client):
    row = {
        "problem": "P1", "n": 10, "solver": "scgp",
        "mean_iter": 5.0, "mean_nf": 12.0, "mean_tcpu_seconds": 0.1,
        "mean_final_residual": 1e-8, "mean_aa_steps": 0.0, "failures": 0,
    }
    response = client.post("/profiles", json={"rows": [row]})
    assert response.status_code == 400
    response = client.post("/profiles", json={"rows": [], "metric": "wall"})
    assert response.status_code == 422
