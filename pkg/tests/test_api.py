"""
Tests for the knots API routes.
"""


def test_invariants(client):
    """Test the invariant report of twist(2)."""
    response = client.post("/api/knots/invariants", json={"expression": "twist(2)"})
    assert response.status_code == 200
    data = response.json()
    assert data["expression"] == "twist(2)"
    assert data["arf"] == 0
    assert data["tau"]["exact"] == 1
    assert len(data["rho0_interval"]) == 2


def test_invariants_parse_error(client):
    """Test that malformed expressions are rejected with 422."""
    response = client.post("/api/knots/invariants", json={"expression": "twist("})
    assert response.status_code == 422
    assert response.json()["error_type"] == "ParseError"


def test_prime(client):
    """Test the irreducibility verdicts."""
    response = client.post("/api/knots/prime", json={"polynomial": "t^2 - 1"})
    assert response.status_code == 200
    assert response.json()["status"] == "Reducible"
    response = client.post("/api/knots/strongly-prime", json={"polynomial": "8*t - 9"})
    assert response.json()["status"] == "StronglyPrime"


def test_strongly_coprime(client):
    """Test the witness for t - 2 against t - 4."""
    response = client.post("/api/knots/strongly-coprime", json={"f": "t - 2", "g": "t - 4"})
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "NotStronglyCoprime"
    assert data["witness"] is not None


def test_domain_error_is_400(client):
    """Test that violated preconditions map to 400."""
    response = client.post("/api/knots/strongly-prime", json={"polynomial": "3"})
    assert response.status_code == 400
    assert "undefined for units" in response.json()["detail"]


def test_legendrian(client):
    """Test a builtin front and an iterated satellite."""
    response = client.post("/api/knots/legendrian", json={"builtin": "twist-front", "param": 3})
    assert response.json()["tb"] == 1
    response = client.post(
        "/api/knots/legendrian",
        json={"builtin": "q-front", "param": 3, "companion_tb": 0, "iterate": 2, "genus": 1},
    )
    data = response.json()
    assert (data["tb"], data["rot"]) == (0, 1)
    assert data["tau"]["exact"] == 1
    response = client.post("/api/knots/legendrian", json={})
    assert response.status_code == 422


def test_robust(client):
    """Test robustness certificates with published and explicit facts."""
    response = client.post("/api/knots/robust", json={"op": "Q", "k": 3, "p_values": [1, 2]})
    assert response.status_code == 200
    assert [c["conclusion"] for c in response.json()] == ["robust", "robust"]
    response = client.post(
        "/api/knots/robust", json={"op": "Q", "k": 3, "p_values": [1], "use_facts": False}
    )
    assert response.json()[0]["conclusion"] is None
    response = client.post("/api/knots/robust", json={"op": "S", "k": 3})
    assert response.status_code == 400


def test_filtration(client):
    """Test filtration levels over HTTP."""
    response = client.post(
        "/api/knots/filtration", json={"expression": "infect(R(1, J='neg-trefoils-3'), twist(4))"}
    )
    assert response.json()["levels"] == ["F_1", "P_1", "N_0", "B_0"]


def test_sweep_lifecycle(client):
    """Test that an eager sweep is done by the time its status is read."""
    response = client.post(
        "/api/knots/sweeps/robust", json={"op": "Q", "k_values": [3], "p_values": [1, 2]}
    )
    assert response.status_code == 202
    job_id = response.json()["job_id"]
    data = client.get(f"/api/knots/sweeps/{job_id}").json()
    assert data["status"] == "done"
    assert len(data["logs"]) == 2
    assert client.get("/api/knots/sweeps/unknown").status_code == 404
