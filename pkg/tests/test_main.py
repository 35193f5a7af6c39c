"""
Tests for the application shell: health, root and error mapping.
"""

from fastapi.testclient import TestClient

from app.main import app
from app.utils.errors import BudgetExceededError


def test_health_endpoint(client):
    """Test that /health reports status, version and environment."""
    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert data["version"] == "0.1.0"
    assert "timestamp" in data
    assert "environment" in data


def test_root_endpoint(client):
    """Test the welcome payload."""
    data = client.get("/").json()
    assert data["message"] == "Welcome to the cable-concordance API"
    assert data["documentation"] == "/docs"
    assert data["health"] == "/health"


def test_budget_error_maps_to_503(client, mocker):
    """Test that an exhausted search budget is reported as 503."""
    mocker.patch(
        "app.api.knots.knots.is_irreducible",
        side_effect=BudgetExceededError("factor search budget exhausted"),
    )
    response = client.post("/api/knots/prime", json={"polynomial": "t^9 + 5"})
    assert response.status_code == 503
    assert response.json()["error_type"] == "BudgetExceededError"


def test_unexpected_error_maps_to_500(mocker):
    """Test that the middleware turns unhandled errors into a JSON 500."""
    mocker.patch("app.api.knots.knots.is_irreducible", side_effect=RuntimeError("boom"))
    response = TestClient(app, raise_server_exceptions=False).post(
        "/api/knots/prime", json={"polynomial": "t - 2"}
    )
    assert response.status_code == 500
    assert response.json()["error_type"] == "RuntimeError"
