"""Exact-scan vector index with a compact binary on-disk format.

The corpus is small (documentation chunks), so search is a full cosine
scan over a contiguous float64 matrix; there is no approximation to tune
or drift. Row vectors are stored unit-normalized, making score = dot
product. Ties rank by document title, then chunk ordinal, so results are
stable across runs and platforms.

File layout (little-endian):
  8 bytes   magic  b"SWRMIDX1"
  u32       dimension
  u32       chunk count
  then per chunk:
  u32       metadata length
  bytes     metadata JSON (chunk_id, doc_title, ordinal, text)
  f64 * d   unit vector
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

_MAGIC = b"SWRMIDX1"


class IndexFormatError(ValueError):
    """The index file is not readable as the expected binary layout."""


def chunk_id_for(doc_title: str, ordinal: int, text: str) -> str:
    digest = hashlib.sha256(
        f"{doc_title}\x00{ordinal}\x00{text}".encode("utf-8")
    ).hexdigest()
    return digest[:24]


@dataclass(frozen=True)
class SearchHit:
    score: float
    chunk_id: str
    doc_title: str
    ordinal: int
    text: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "score": self.score,
            "chunk_id": self.chunk_id,
            "doc_title": self.doc_title,
            "ordinal": self.ordinal,
            "text": self.text,
        }


class VectorIndex:
    def __init__(self, dimension: int) -> None:
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self._dimension = dimension
        self._metadata: list[dict[str, Any]] = []
        self._matrix = np.empty((0, dimension), dtype=np.float64)

    @property
    def dimension(self) -> int:
        return self._dimension

    def __len__(self) -> int:
        return len(self._metadata)

    @property
    def doc_titles(self) -> list[str]:
        return sorted({m["doc_title"] for m in self._metadata})

    @staticmethod
    def _normalize(matrix: np.ndarray) -> np.ndarray:
        norms = np.linalg.norm(matrix, axis=1)
        norms[norms == 0.0] = 1.0
        return matrix / norms[:, None]

    def upsert_document(self, doc_title: str, chunks: list[str], vectors: np.ndarray) -> int:
        """Replace all chunks of one document; idempotent per title."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(chunks):
            raise ValueError("vectors must be one row per chunk")
        if vectors.shape[1] != self._dimension:
            raise ValueError(
                f"vector dimension {vectors.shape[1]} does not match index "
                f"dimension {self._dimension}"
            )
        keep = [i for i, m in enumerate(self._metadata) if m["doc_title"] != doc_title]
        metadata = [self._metadata[i] for i in keep]
        matrix = self._matrix[keep] if keep else np.empty((0, self._dimension), dtype=np.float64)
        for ordinal, text in enumerate(chunks):
            metadata.append(
                {
                    "chunk_id": chunk_id_for(doc_title, ordinal, text),
                    "doc_title": doc_title,
                    "ordinal": ordinal,
                    "text": text,
                }
            )
        self._metadata = metadata
        self._matrix = np.vstack([matrix, self._normalize(vectors)]) if chunks else matrix
        return len(chunks)

    def search(self, query_vector: np.ndarray, k: int) -> list[SearchHit]:
        if k <= 0:
            raise ValueError("k must be positive")
        if not self._metadata:
            return []
        query = np.asarray(query_vector, dtype=np.float64).reshape(-1)
        if query.shape[0] != self._dimension:
            raise ValueError(
                f"query dimension {query.shape[0]} does not match index "
                f"dimension {self._dimension}"
            )
        norm = float(np.linalg.norm(query))
        if norm > 0.0:
            query = query / norm
        scores = self._matrix @ query
        order = sorted(
            range(len(self._metadata)),
            key=lambda i: (
                -scores[i],
                self._metadata[i]["doc_title"],
                self._metadata[i]["ordinal"],
            ),
        )
        hits = []
        for i in order[:k]:
            meta = self._metadata[i]
            hits.append(
                SearchHit(
                    score=float(scores[i]),
                    chunk_id=meta["chunk_id"],
                    doc_title=meta["doc_title"],
                    ordinal=meta["ordinal"],
                    text=meta["text"],
                )
            )
        return hits

    # -- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<II", self._dimension, len(self._metadata)))
            for meta, row in zip(self._metadata, self._matrix):
                blob = json.dumps(meta, ensure_ascii=False).encode("utf-8")
                fh.write(struct.pack("<I", len(blob)))
                fh.write(blob)
                fh.write(row.astype("<f8").tobytes())
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> VectorIndex:
        data = Path(path).read_bytes()
        if len(data) < len(_MAGIC) + 8 or not data.startswith(_MAGIC):
            raise IndexFormatError(f"{path}: not a vector index file")
        offset = len(_MAGIC)
        dimension, count = struct.unpack_from("<II", data, offset)
        offset += 8
        index = cls(dimension)
        metadata: list[dict[str, Any]] = []
        rows: list[np.ndarray] = []
        row_bytes = 8 * dimension
        for _ in range(count):
            if offset + 4 > len(data):
                raise IndexFormatError(f"{path}: truncated metadata length")
            (meta_len,) = struct.unpack_from("<I", data, offset)
            offset += 4
            if offset + meta_len + row_bytes > len(data):
                raise IndexFormatError(f"{path}: truncated chunk record")
            try:
                meta = json.loads(data[offset : offset + meta_len].decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise IndexFormatError(f"{path}: bad chunk metadata: {exc}") from exc
            offset += meta_len
            row = np.frombuffer(data[offset : offset + row_bytes], dtype="<f8")
            offset += row_bytes
            metadata.append(meta)
            rows.append(row.astype(np.float64))
        if offset != len(data):
            raise IndexFormatError(f"{path}: {len(data) - offset} trailing bytes")
        index._metadata = metadata
        index._matrix = (
            np.vstack(rows) if rows else np.empty((0, dimension), dtype=np.float64)
        )
        return index
