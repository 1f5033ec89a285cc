"""Text embedders: a deterministic local hasher and an HTTP client.

HashEmbedder exists so retrieval behavior is exactly reproducible in tests
and offline runs: token vectors derive from SHA-256, not from process
state, an RNG, or platform word size. It is a bag-of-words model; texts
sharing no tokens get near-orthogonal vectors.
"""

from __future__ import annotations

import hashlib
import os
import re
from typing import Protocol

import numpy as np
import requests

from swarm_agent.errors import ToolError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

DEFAULT_DIMENSION = 32

ENV_EMBED_ENDPOINT = "SWARM_EMBED_ENDPOINT"
ENV_EMBED_MODEL = "SWARM_EMBED_MODEL"
ENV_LLM_API_KEY = "SWARM_LLM_API_KEY"


class Embedder(Protocol):
    @property
    def dimension(self) -> int: ...

    def embed(self, texts: list[str]) -> np.ndarray: ...


def _token_vector(token: str, dimension: int) -> np.ndarray:
    """Expand SHA-256 of the token into ``dimension`` floats in [-1, 1]."""
    raw = b""
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    while len(raw) < dimension:
        raw += digest
        digest = hashlib.sha256(digest).digest()
    values = np.frombuffer(raw[:dimension], dtype=np.uint8).astype(np.float64)
    return values / 127.5 - 1.0


class HashEmbedder:
    """Deterministic bag-of-words embedder over hashed token vectors."""

    def __init__(self, dimension: int = DEFAULT_DIMENSION) -> None:
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self._dimension = dimension
        self._cache: dict[str, np.ndarray] = {}

    @property
    def dimension(self) -> int:
        return self._dimension

    def _vector_for(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            vec = _token_vector(token, self._dimension)
            self._cache[token] = vec
        return vec

    def embed(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self._dimension), dtype=np.float64)
        for row, text in enumerate(texts):
            for token in _TOKEN_RE.findall(text.lower()):
                out[row] += self._vector_for(token)
            norm = float(np.linalg.norm(out[row]))
            if norm > 0.0:
                out[row] /= norm
        return out


class HttpEmbedder:
    """OpenAI-compatible embeddings endpoint client."""

    def __init__(
        self,
        endpoint: str = "",
        model: str = "",
        api_key: str = "",
        dimension: int = 0,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ) -> None:
        self._endpoint = endpoint or os.environ.get(ENV_EMBED_ENDPOINT, "")
        self._model = model or os.environ.get(ENV_EMBED_MODEL, "")
        self._api_key = api_key or os.environ.get(ENV_LLM_API_KEY, "")
        if not self._endpoint:
            raise ValueError(
                f"embedding endpoint required (argument or {ENV_EMBED_ENDPOINT})"
            )
        self._dimension = dimension
        self._timeout = timeout
        self._session = session or requests.Session()

    @property
    def dimension(self) -> int:
        if self._dimension == 0:
            # Not known until the first response arrives.
            probe = self.embed(["dimension probe"])
            self._dimension = int(probe.shape[1])
        return self._dimension

    def embed(self, texts: list[str]) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        try:
            response = self._session.post(
                self._endpoint,
                json={"model": self._model, "input": texts},
                headers=headers,
                timeout=self._timeout,
            )
        except requests.RequestException as exc:
            raise ToolError.backend_unavailable(
                f"embedding service unreachable: {exc}"
            ) from exc
        if response.status_code != 200:
            raise ToolError.backend_unavailable(
                f"embedding service returned {response.status_code}"
            )
        try:
            payload = response.json()
            rows = [entry["embedding"] for entry in payload["data"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ToolError.backend_unavailable(
                "embedding service returned an unexpected body"
            ) from exc
        if len(rows) != len(texts):
            raise ToolError.backend_unavailable(
                f"embedding service returned {len(rows)} vectors for {len(texts)} inputs"
            )
        matrix = np.asarray(rows, dtype=np.float64)
        if self._dimension == 0 and matrix.size:
            self._dimension = int(matrix.shape[1])
        return matrix
