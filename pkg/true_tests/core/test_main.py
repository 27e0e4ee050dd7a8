"""Tests for main FastAPI application."""

import sys
from datetime import datetime, timezone
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from main import app


def test_health_check_endpoint():
    """GET /health returns {'ok': True} and a recent ISO 8601 UTC timestamp."""
    with TestClient(app) as client:
        response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["ok"] is True
    timestamp_str = data["time"]
    assert timestamp_str.endswith("Z"), "Timestamp should end with 'Z' for UTC"
    assert "+00:00" not in timestamp_str
    parsed_time = datetime.fromisoformat(timestamp_str.replace("Z", "+00:00"))
    assert abs((datetime.now(timezone.utc) - parsed_time).total_seconds()) < 60


def test_health_check_response_content_type():
    """Health check returns JSON."""
    with TestClient(app) as client:
        response = client.get("/health")
    assert response.headers["content-type"] == "application/json"


def test_routers_are_mounted():
    paths = {route.path for route in app.routes}
    assert {"/api/integrated", "/api/spot", "/study/presets", "/study/run"} <= paths
