"""
Shared fixtures: the HTTP client, the published facts and a clean job store.
"""

import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.services.facts import FactBook, load_facts
from app.utils.background_job import clear_jobs


@pytest.fixture
def client():
    """
    TestClient over the cable-concordance API.

    Returns:
        TestClient: A test client for the FastAPI application
    """
    return TestClient(app)


@pytest.fixture(scope="session")
def facts() -> FactBook:
    """The shipped facts file, loaded once."""
    return load_facts()


@pytest.fixture(autouse=True)
def fresh_jobs():
    clear_jobs()
    yield
    clear_jobs()
