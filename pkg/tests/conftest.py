"""Shared fixtures: a seeded in-memory deployment plus scenario helpers."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from swarm_agent.llm.scripted import ScriptedProvider, load_script
from swarm_agent.orchestrator.registry import ToolRegistry
from swarm_agent.orchestrator.turn import Orchestrator
from swarm_agent.pipelines.agent import PipelineAgent
from swarm_agent.pipelines.fake import FakePipelineBackend
from swarm_agent.rag.agent import RagAgent
from swarm_agent.rag.embedding import HashEmbedder
from swarm_agent.rag.index import VectorIndex
from swarm_agent.runtime import build_default_registry, make_run_resolver
from swarm_agent.sessions.models import UserContext
from swarm_agent.storage.agent import StorageAgent
from swarm_agent.storage.memory import InMemoryObjectStore

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"
SCRIPTS_DIR = FIXTURES_DIR / "scripts"
DOCS_DIR = FIXTURES_DIR / "docs"

SVM_PIPELINE = "diabetes-svm-classification-pipeline"
DT_PIPELINE = "diabetes-dt-classification-pipeline"
SVM_PIPELINE_ID = "d74d8f12-30c5-4a84-91e3-2ab8e647559c"
DT_PIPELINE_ID = "29714e06-88b2-4f1c-a5d3-61c0fb292a78"

SVM_METRICS = {"accuracy": 0.752, "precision": 0.739, "recall": 0.773, "f1": 0.756, "auc": 0.842}
DT_METRICS = {"accuracy": 0.706, "precision": 0.699, "recall": 0.718, "f1": 0.709, "auc": 0.708}


def load_fixture_dict() -> dict:
    return json.loads((FIXTURES_DIR / "diabetes.json").read_text(encoding="utf-8"))


def make_backend(object_store: InMemoryObjectStore | None = None) -> FakePipelineBackend:
    backend = FakePipelineBackend(object_store=object_store)
    backend.load_fixture(load_fixture_dict())
    return backend


def make_registry(
    backend: FakePipelineBackend, object_store: InMemoryObjectStore
) -> ToolRegistry:
    pipeline_agent = PipelineAgent(backend)
    storage_agent = StorageAgent(
        store=object_store, run_resolver=make_run_resolver(backend)
    )
    rag_agent = RagAgent(VectorIndex(32), HashEmbedder(32))
    return build_default_registry(pipeline_agent, storage_agent, rag_agent)


def make_orchestrator(script_name: str, registry: ToolRegistry, **kwargs) -> Orchestrator:
    provider = ScriptedProvider(load_script(SCRIPTS_DIR / script_name))
    return Orchestrator(provider=provider, registry=registry, **kwargs)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per release acceptance check."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            label = nodeid.split("::", 1)[1] if "::" in nodeid else nodeid
            lines.append((label, outcome == "passed"))
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, ok in sorted(lines):
        marker = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{marker}  {label}")


@pytest.fixture()
def alice() -> UserContext:
    return UserContext(
        user_id="alice",
        namespace="shared",
        allowed_buckets=frozenset({"mlpipeline"}),
        credential_ref="cred-alice",
    )


@pytest.fixture()
def bob() -> UserContext:
    return UserContext(
        user_id="bob",
        namespace="team-alpha",
        allowed_buckets=frozenset({"team-alpha-data"}),
        credential_ref="cred-bob",
    )


@pytest.fixture()
def object_store() -> InMemoryObjectStore:
    return InMemoryObjectStore()


@pytest.fixture()
def backend(object_store: InMemoryObjectStore) -> FakePipelineBackend:
    return make_backend(object_store)


@pytest.fixture()
def registry(
    backend: FakePipelineBackend, object_store: InMemoryObjectStore
) -> ToolRegistry:
    return make_registry(backend, object_store)
