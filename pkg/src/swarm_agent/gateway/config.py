"""Service configuration: a single JSON file, validated up front.

Secrets for remote services (LLM endpoint key, object-storage keys) may
come from the environment instead of the file; the corresponding clients
read SWARM_LLM_* and SWARM_EMBED_* variables when a field is empty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from swarm_agent.sessions.models import UserContext


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ListenConfig:
    host: str = "127.0.0.1"
    port: int = 8080


@dataclass(frozen=True)
class LlmConfig:
    provider: str = "scripted"  # scripted | openai
    script_path: str = ""
    endpoint: str = ""
    model: str = ""
    api_key: str = ""


@dataclass(frozen=True)
class EmbedderConfig:
    provider: str = "hash"  # hash | http
    dimension: int = 32
    endpoint: str = ""
    model: str = ""


@dataclass(frozen=True)
class S3Config:
    endpoint: str = ""
    access_key: str = ""
    secret_key: str = ""
    region: str = "us-east-1"


@dataclass(frozen=True)
class BackendsConfig:
    pipelines: str = "fake"  # fake | rest
    objects: str = "memory"  # memory | s3
    pipelines_endpoint: str = ""
    pipelines_token: str = ""
    s3: S3Config = field(default_factory=S3Config)


@dataclass(frozen=True)
class LimitsConfig:
    max_iterations: int = 8
    batch_concurrency: int = 4


@dataclass(frozen=True)
class AppConfig:
    listen: ListenConfig
    llm: LlmConfig
    embedder: EmbedderConfig
    backends: BackendsConfig
    tokens: dict[str, UserContext]
    limits: LimitsConfig
    data_dir: Path
    fixture: str = ""
    docs_dir: str = ""
    index_path: Path = Path()

    def context_for_token(self, token: str) -> UserContext | None:
        return self.tokens.get(token)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _parse_tokens(raw: Any) -> dict[str, UserContext]:
    _require(isinstance(raw, dict) and raw, "config needs a non-empty 'tokens' object")
    tokens: dict[str, UserContext] = {}
    for token, entry in raw.items():
        _require(
            isinstance(entry, dict) and entry.get("user_id") and entry.get("namespace"),
            f"token entry {token!r} needs user_id and namespace",
        )
        tokens[token] = UserContext(
            user_id=entry["user_id"],
            namespace=entry["namespace"],
            allowed_buckets=frozenset(entry.get("buckets", [])),
            credential_ref=entry.get("credential_ref", ""),
        )
    return tokens


def parse_config(raw: dict[str, Any], base_dir: Path) -> AppConfig:
    _require(isinstance(raw, dict), "config root must be a JSON object")

    listen_raw = raw.get("listen") or {}
    listen = ListenConfig(
        host=listen_raw.get("host", "127.0.0.1"),
        port=int(listen_raw.get("port", 8080)),
    )

    def _rel(path_str: str) -> str:
        if not path_str:
            return ""
        path = Path(path_str)
        return str(path if path.is_absolute() else base_dir / path)

    llm_raw = raw.get("llm") or {}
    llm = LlmConfig(
        provider=llm_raw.get("provider", "scripted"),
        script_path=_rel(llm_raw.get("script_path", "")),
        endpoint=llm_raw.get("endpoint", ""),
        model=llm_raw.get("model", ""),
        api_key=llm_raw.get("api_key", ""),
    )
    _require(llm.provider in ("scripted", "openai"), f"unknown llm provider {llm.provider!r}")
    if llm.provider == "scripted":
        _require(bool(llm.script_path), "scripted llm provider needs llm.script_path")

    embed_raw = raw.get("embedder") or {}
    embedder = EmbedderConfig(
        provider=embed_raw.get("provider", "hash"),
        dimension=int(embed_raw.get("dimension", 32)),
        endpoint=embed_raw.get("endpoint", ""),
        model=embed_raw.get("model", ""),
    )
    _require(embedder.provider in ("hash", "http"), f"unknown embedder {embedder.provider!r}")
    _require(embedder.dimension > 0, "embedder.dimension must be positive")

    backends_raw = raw.get("backends") or {}
    s3_raw = backends_raw.get("s3") or {}
    backends = BackendsConfig(
        pipelines=backends_raw.get("pipelines", "fake"),
        objects=backends_raw.get("objects", "memory"),
        pipelines_endpoint=backends_raw.get("pipelines_endpoint", ""),
        pipelines_token=backends_raw.get("pipelines_token", ""),
        s3=S3Config(
            endpoint=s3_raw.get("endpoint", ""),
            access_key=s3_raw.get("access_key", ""),
            secret_key=s3_raw.get("secret_key", ""),
            region=s3_raw.get("region", "us-east-1"),
        ),
    )
    _require(
        backends.pipelines in ("fake", "rest"),
        f"unknown pipelines backend {backends.pipelines!r}",
    )
    _require(
        backends.objects in ("memory", "s3"),
        f"unknown objects backend {backends.objects!r}",
    )
    if backends.pipelines == "rest":
        _require(bool(backends.pipelines_endpoint), "rest pipelines backend needs pipelines_endpoint")
    if backends.objects == "s3":
        _require(bool(backends.s3.endpoint), "s3 objects backend needs backends.s3.endpoint")

    tokens = _parse_tokens(raw.get("tokens"))

    limits_raw = raw.get("limits") or {}
    limits = LimitsConfig(
        max_iterations=int(limits_raw.get("max_iterations", 8)),
        batch_concurrency=int(limits_raw.get("batch_concurrency", 4)),
    )
    _require(limits.max_iterations >= 1, "limits.max_iterations must be at least 1")
    _require(limits.batch_concurrency >= 1, "limits.batch_concurrency must be at least 1")

    data_dir = Path(raw.get("data_dir", "data"))
    if not data_dir.is_absolute():
        data_dir = base_dir / data_dir
    index_path = Path(raw["index_path"]) if raw.get("index_path") else data_dir / "rag_index.bin"
    if not index_path.is_absolute():
        index_path = base_dir / index_path

    return AppConfig(
        listen=listen,
        llm=llm,
        embedder=embedder,
        backends=backends,
        tokens=tokens,
        limits=limits,
        data_dir=data_dir,
        fixture=_rel(raw.get("fixture", "")),
        docs_dir=_rel(raw.get("docs_dir", "")),
        index_path=index_path,
    )


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw, path.resolve().parent)
