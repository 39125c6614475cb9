#!/usr/bin/env python3
"""Capture real API payloads for the frontend's golden-snapshot tests.

Runs a deterministic scripted conversation against the service (in
process, no network) and writes each response JSON under
frontend/tests/fixtures/. Re-run after engine changes;
tests/test_ui_fixtures.py fails if the committed copies drift.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from askrec.config import EngineConfig, ServiceConfig
from askrec.dialogue import DialogueEngine
from askrec.fixtures import load_default_catalog
from askrec.service import create_app

OUT = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures"


def capture() -> dict[str, dict]:
    engine = DialogueEngine(load_default_catalog(), EngineConfig())
    app = create_app(ServiceConfig(), engine=engine)
    payloads: dict[str, dict] = {}
    with TestClient(app) as client:
        payloads["schema"] = client.get("/catalog/schema").json()

        created = client.post("/sessions", json={"strategy": "es", "k": 2}).json()
        sid = created["session_id"]
        payloads["session_created"] = {**created, "session_id": "sess-fixture"}

        payloads["question_response"] = client.post(
            f"/sessions/{sid}/messages?debug=1",
            json={"text": "Looking for a used SUV under $30k, I want excellent fuel economy"},
        ).json()
        client.post(
            f"/sessions/{sid}/messages", json={"text": "under 60,000 miles would be best"}
        )
        payloads["recommendations_response"] = client.post(
            f"/sessions/{sid}/messages", json={"text": "hybrid would be ideal"}
        ).json()

        snapshot = client.get(f"/sessions/{sid}").json()
        snapshot["session_id"] = "sess-fixture"
        payloads["session_snapshot"] = snapshot

        relaxer = client.post("/sessions", json={"strategy": "es", "k": 0}).json()
        payloads["relaxed_response"] = client.post(
            f"/sessions/{relaxer['session_id']}/messages",
            json={"text": "a green diesel minivan under $5k"},
        ).json()
    return payloads


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for name, payload in capture().items():
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
