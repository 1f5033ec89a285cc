"""Semantic chunking: split where adjacent-sentence similarity drops.

The body is whitespace-normalized, split into sentences, and re-grouped
into chunks at breakpoints where the embedding distance between adjacent
sentence windows exceeds the 95th percentile of all adjacent distances.
Joining the resulting chunks with single spaces reproduces the normalized
body exactly; chunking never loses or reorders text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Trailing tokens that end with a period but do not end a sentence.
_ABBREVIATIONS = frozenset(
    {
        "e.g.",
        "i.e.",
        "etc.",
        "vs.",
        "cf.",
        "al.",
        "fig.",
        "no.",
        "dr.",
        "mr.",
        "mrs.",
        "ms.",
        "prof.",
        "st.",
        "approx.",
    }
)

_WHITESPACE_RE = re.compile(r"\s+")
# A sentence boundary candidate: terminal punctuation, one space (the body
# is already normalized), then an uppercase letter, digit, or opening
# quote/bracket.
_BOUNDARY_RE = re.compile(r"[.!?]+[\"')\]]* (?=[A-Z0-9\"'(\[])")

DEFAULT_PERCENTILE = 95.0
DEFAULT_WINDOW = 1


def normalize_body(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim the ends."""
    return _WHITESPACE_RE.sub(" ", text).strip()


def split_sentences(normalized: str) -> list[str]:
    """Split a normalized body into sentences.

    Joining the result with single spaces reproduces the input exactly.
    """
    if not normalized:
        return []
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY_RE.finditer(normalized):
        candidate = normalized[start : match.end() - 1]
        last_word = candidate.rsplit(" ", 1)[-1].lower()
        if last_word in _ABBREVIATIONS:
            continue
        sentences.append(candidate)
        start = match.end()
    tail = normalized[start:]
    if tail:
        sentences.append(tail)
    return sentences


@dataclass(frozen=True)
class ChunkingResult:
    chunks: list[str]
    sentences: list[str]
    distances: list[float] = field(default_factory=list)
    threshold: float = 0.0


def _windowed(sentences: Sequence[str], index: int, window: int) -> str:
    lo = max(0, index - window)
    hi = min(len(sentences), index + window + 1)
    return " ".join(sentences[lo:hi])


def chunk_text(
    text: str,
    embed_fn: Callable[[list[str]], np.ndarray],
    percentile: float = DEFAULT_PERCENTILE,
    window: int = DEFAULT_WINDOW,
) -> ChunkingResult:
    """Chunk a document body along semantic breakpoints.

    ``embed_fn`` embeds a batch of texts into row vectors. Distances are
    cosine distances between the windowed embeddings of adjacent
    sentences; a breakpoint opens a new chunk after sentence ``i`` when
    ``distance[i]`` is strictly above the percentile threshold.
    """
    normalized = normalize_body(text)
    sentences = split_sentences(normalized)
    if len(sentences) <= 1:
        return ChunkingResult(chunks=list(sentences), sentences=sentences)

    contexts = [_windowed(sentences, i, window) for i in range(len(sentences))]
    vectors = np.asarray(embed_fn(contexts), dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    norms[norms == 0.0] = 1.0
    unit = vectors / norms[:, None]
    distances = [
        float(1.0 - np.dot(unit[i], unit[i + 1])) for i in range(len(sentences) - 1)
    ]
    threshold = float(np.percentile(distances, percentile))

    chunks: list[str] = []
    current: list[str] = [sentences[0]]
    for i, distance in enumerate(distances):
        if distance > threshold:
            chunks.append(" ".join(current))
            current = []
        current.append(sentences[i + 1])
    chunks.append(" ".join(current))
    return ChunkingResult(
        chunks=chunks, sentences=sentences, distances=distances, threshold=threshold
    )
