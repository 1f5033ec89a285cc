"""Builds a running service from configuration.

This is the only place that knows how the pieces fit together: which LLM
provider to construct, which backends, the default tool set (eight
pipeline tools, five storage tools, one retrieval tool), and the stores
the gateway serves from.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from swarm_agent.gateway.auth import TokenAuthenticator
from swarm_agent.gateway.config import AppConfig
from swarm_agent.llm.base import LlmProvider
from swarm_agent.llm.openai_client import OpenAIChatClient
from swarm_agent.llm.scripted import ScriptedProvider, load_script
from swarm_agent.orchestrator.registry import ToolRegistry
from swarm_agent.orchestrator.turn import Orchestrator
from swarm_agent.pipelines.agent import PipelineAgent, PipelineBackend, build_pipeline_tools
from swarm_agent.pipelines.fake import FakePipelineBackend
from swarm_agent.pipelines.models import Run
from swarm_agent.pipelines.rest import KfpRestBackend, RestPipelineBackend
from swarm_agent.rag.agent import RagAgent, build_rag_tools
from swarm_agent.rag.embedding import Embedder, HashEmbedder, HttpEmbedder
from swarm_agent.rag.index import VectorIndex
from swarm_agent.sessions.models import SHARED_NAMESPACE
from swarm_agent.sessions.store import FileSessionStore, SessionStore
from swarm_agent.storage import paths
from swarm_agent.storage.agent import StorageAgent, build_storage_tools
from swarm_agent.storage.memory import InMemoryObjectStore
from swarm_agent.storage.models import ObjectStore
from swarm_agent.storage.s3 import S3ObjectStore

logger = logging.getLogger(__name__)


@dataclass
class Services:
    config: AppConfig
    authenticator: TokenAuthenticator
    session_store: SessionStore
    object_store: ObjectStore
    pipeline_backend: PipelineBackend
    registry: ToolRegistry
    orchestrator: Orchestrator
    rag_agent: RagAgent


def make_run_resolver(backend: PipelineBackend) -> Callable[[str], list[Run]]:
    """Pipeline name (either form) to that pipeline's runs, newest first."""

    def resolve(pipeline_name: str) -> list[Run]:
        pipeline = None
        pipelines = backend.list_pipelines()
        for candidate in paths.name_candidates(pipeline_name):
            pipeline = next((p for p in pipelines if p.name == candidate), None)
            if pipeline is not None:
                break
        if pipeline is None:
            return []
        runs = [r for r in backend.list_runs() if r.pipeline_id == pipeline.id]
        runs.sort(key=lambda r: (r.created_at, r.run_id), reverse=True)
        return runs

    return resolve


def build_default_registry(
    pipeline_agent: PipelineAgent,
    storage_agent: StorageAgent,
    rag_agent: RagAgent,
) -> ToolRegistry:
    registry = ToolRegistry()
    registry.register_all(build_pipeline_tools(pipeline_agent), "kfp")
    registry.register_all(build_storage_tools(storage_agent), "minio")
    registry.register_all(build_rag_tools(rag_agent), "rag")
    return registry


def build_provider(config: AppConfig) -> LlmProvider:
    if config.llm.provider == "scripted":
        return ScriptedProvider(load_script(Path(config.llm.script_path)))
    return OpenAIChatClient(
        endpoint=config.llm.endpoint,
        model=config.llm.model,
        api_key=config.llm.api_key,
    )


def build_embedder(config: AppConfig) -> Embedder:
    if config.embedder.provider == "hash":
        return HashEmbedder(config.embedder.dimension)
    return HttpEmbedder(
        endpoint=config.embedder.endpoint,
        model=config.embedder.model,
        dimension=config.embedder.dimension,
    )


def build_object_store(config: AppConfig) -> ObjectStore:
    if config.backends.objects == "memory":
        return InMemoryObjectStore()
    s3 = config.backends.s3
    return S3ObjectStore(
        endpoint=s3.endpoint,
        access_key=s3.access_key,
        secret_key=s3.secret_key,
        region=s3.region,
    )


def build_pipeline_backend(config: AppConfig, object_store: ObjectStore) -> PipelineBackend:
    if config.backends.pipelines == "fake":
        store = object_store if isinstance(object_store, InMemoryObjectStore) else None
        backend = FakePipelineBackend(
            object_store=store,
            state_path=config.data_dir / "pipelines_state.json",
        )
        backend.load_state()
        return backend
    namespaces = sorted({ctx.namespace for ctx in config.tokens.values()} | {SHARED_NAMESPACE})
    client = KfpRestBackend(
        endpoint=config.backends.pipelines_endpoint,
        token=config.backends.pipelines_token,
    )
    return RestPipelineBackend(client, namespaces)


def build_rag_agent(config: AppConfig, embedder: Embedder) -> RagAgent:
    if config.index_path.exists():
        index = VectorIndex.load(config.index_path)
        if index.dimension != embedder.dimension:
            raise ValueError(
                f"index at {config.index_path} has dimension {index.dimension}, "
                f"embedder produces {embedder.dimension}; re-run indexing"
            )
    else:
        index = VectorIndex(embedder.dimension)
    return RagAgent(index, embedder)


def build_services(config: AppConfig) -> Services:
    config.data_dir.mkdir(parents=True, exist_ok=True)
    object_store = build_object_store(config)
    pipeline_backend = build_pipeline_backend(config, object_store)
    embedder = build_embedder(config)
    rag_agent = build_rag_agent(config, embedder)

    pipeline_agent = PipelineAgent(pipeline_backend)
    storage_agent = StorageAgent(
        store=object_store,
        run_resolver=make_run_resolver(pipeline_backend),
    )
    registry = build_default_registry(pipeline_agent, storage_agent, rag_agent)

    provider = build_provider(config)
    orchestrator = Orchestrator(
        provider=provider,
        registry=registry,
        model=config.llm.model or "default",
        max_iterations=config.limits.max_iterations,
        batch_concurrency=config.limits.batch_concurrency,
    )
    session_store = FileSessionStore(config.data_dir)
    return Services(
        config=config,
        authenticator=TokenAuthenticator(config.tokens),
        session_store=session_store,
        object_store=object_store,
        pipeline_backend=pipeline_backend,
        registry=registry,
        orchestrator=orchestrator,
        rag_agent=rag_agent,
    )


def seed_fixture(backend: PipelineBackend, fixture_path: str | Path) -> dict[str, int]:
    """Load a pipelines fixture into the fake backend."""
    if not isinstance(backend, FakePipelineBackend):
        raise ValueError("seeding requires the fake pipelines backend")
    raw = json.loads(Path(fixture_path).read_text(encoding="utf-8"))
    backend.load_fixture(raw)
    return {
        "pipelines": len(backend.list_pipelines()),
        "experiments": len(backend.list_experiments()),
        "runs": len(backend.list_runs()),
    }
