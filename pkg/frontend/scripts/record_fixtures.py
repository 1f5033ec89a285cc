"""Record gateway SSE event logs for the view-model replay tests.

Runs the demo scenarios against an in-process gateway and writes one
JSON event log per scenario into tests/fixtures/. Requires the backend
package (pip install -e ../..) plus its test extras.

Usage: python3 scripts/record_fixtures.py
"""

from __future__ import annotations

import json
import time
from pathlib import Path

from fastapi.testclient import TestClient

from swarm_agent.gateway.app import create_app
from swarm_agent.gateway.config import parse_config
from swarm_agent.runtime import build_services, seed_fixture

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
FIXTURES_OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SCENARIOS = {
    "scenario-a": ("va.json", "What pipelines are available?"),
    "scenario-c": ("vc.json", "Compare the SVM and decision tree models"),
}


def record(script_name: str, user_text: str, tmp_dir: Path) -> list[dict]:
    raw = {
        "llm": {
            "provider": "scripted",
            "script_path": str(REPO_ROOT / "fixtures" / "scripts" / script_name),
        },
        "tokens": {
            "tok-alice": {
                "user_id": "alice",
                "namespace": "shared",
                "buckets": ["mlpipeline"],
            }
        },
        "data_dir": str(tmp_dir / script_name.replace(".json", "")),
    }
    services = build_services(parse_config(raw, tmp_dir))
    seed_fixture(services.pipeline_backend, REPO_ROOT / "fixtures" / "diabetes.json")
    client = TestClient(create_app(services))
    headers = {"Authorization": "Bearer tok-alice"}

    session_id = client.post("/api/sessions", headers=headers).json()["session_id"]
    events: list[dict] = []
    started = time.perf_counter()
    buffer = ""
    with client.stream(
        "POST",
        f"/api/sessions/{session_id}/messages",
        headers=headers,
        json={"text": user_text},
    ) as response:
        assert response.status_code == 200, response.status_code
        for chunk in response.iter_text():
            buffer += chunk
            while "\n\n" in buffer:
                frame, buffer = buffer.split("\n\n", 1)
                at_ms = round((time.perf_counter() - started) * 1000, 3)
                kind = ""
                data = ""
                for line in frame.split("\n"):
                    if line.startswith("event: "):
                        kind = line[len("event: "):]
                    elif line.startswith("data: "):
                        data = line[len("data: "):]
                events.append({"kind": kind, "data": json.loads(data), "at": at_ms})
    return events


def main() -> None:
    import tempfile

    FIXTURES_OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        for name, (script, text) in SCENARIOS.items():
            events = record(script, text, Path(tmp))
            out = FIXTURES_OUT / f"{name}.events.json"
            out.write_text(
                json.dumps({"scenario": name, "user_text": text, "events": events}, indent=2)
                + "\n",
                encoding="utf-8",
            )
            print(f"wrote {out.relative_to(Path.cwd())} ({len(events)} events)")


if __name__ == "__main__":
    main()
