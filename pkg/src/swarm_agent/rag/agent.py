"""Documentation retrieval exposed to the model as a callable tool.

Documents are chunked semantically, embedded, and indexed once (CLI
``index`` command or direct ingestion); retrieval embeds the query and
returns the top-k chunks plus a budgeted context block ready to quote.
Documentation is global: no namespace checks apply here.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Callable

from swarm_agent.errors import ToolError
from swarm_agent.messages import ParamSpec, ToolDescriptor
from swarm_agent.rag.chunking import chunk_text
from swarm_agent.rag.embedding import Embedder
from swarm_agent.rag.index import SearchHit, VectorIndex
from swarm_agent.sessions.models import UserContext

ToolHandler = Callable[[UserContext, dict[str, Any]], dict[str, Any]]

DEFAULT_K = 5
MAX_K = 20
CONTEXT_BUDGET = 8192
_RESULT_TEXT_LIMIT = 400
_TRUNCATION_MARK = " ... [truncated]"


def _doc_title(path: Path, body: str) -> str:
    for line in body.splitlines():
        stripped = line.strip()
        if stripped.startswith("# "):
            return stripped[2:].strip()
        if stripped:
            break
    return path.stem.replace("_", " ").replace("-", " ")


class RagAgent:
    def __init__(
        self,
        index: VectorIndex,
        embedder: Embedder,
        context_budget: int = CONTEXT_BUDGET,
    ) -> None:
        if index.dimension != embedder.dimension:
            raise ValueError(
                f"index dimension {index.dimension} does not match embedder "
                f"dimension {embedder.dimension}"
            )
        self._index = index
        self._embedder = embedder
        self._context_budget = context_budget

    @property
    def index(self) -> VectorIndex:
        return self._index

    # -- ingestion -----------------------------------------------------------

    def ingest_document(self, doc_title: str, text: str) -> dict[str, Any]:
        if not doc_title:
            raise ToolError.invalid_argument("doc_title must be non-empty")
        result = chunk_text(text, self._embedder.embed)
        if not result.chunks:
            raise ToolError.invalid_argument(
                f"document {doc_title!r} contains no text to index"
            )
        vectors = self._embedder.embed(result.chunks)
        count = self._index.upsert_document(doc_title, result.chunks, vectors)
        return {"doc_title": doc_title, "chunks_indexed": count}

    def ingest_directory(self, directory: str | Path) -> list[dict[str, Any]]:
        directory = Path(directory)
        if not directory.is_dir():
            raise ToolError.invalid_argument(f"{directory} is not a directory")
        reports = []
        for path in sorted(directory.rglob("*")):
            if path.suffix.lower() not in (".md", ".txt") or not path.is_file():
                continue
            body = path.read_text(encoding="utf-8")
            reports.append(self.ingest_document(_doc_title(path, body), body))
        return reports

    # -- retrieval --------------------------------------------------------------

    def retrieve(self, query: str, k: int = DEFAULT_K) -> list[SearchHit]:
        vector = self._embedder.embed([query])[0]
        return self._index.search(vector, k)

    def format_context(self, hits: list[SearchHit]) -> str:
        """Render hits into a quoting-ready block within the context budget.

        Chunks that do not fit whole are truncated with a visible marker;
        once fewer than one marked line fits, remaining hits are dropped.
        """
        budget = self._context_budget
        parts = ["Retrieved context:"]
        used = len(parts[0])
        for rank, hit in enumerate(hits, start=1):
            header = f"[{rank}] {hit.doc_title} (score {hit.score:.3f})"
            block = f"\n{header}\n{hit.text}"
            if used + len(block) <= budget:
                parts.append(block)
                used += len(block)
                continue
            room = budget - used - len(header) - len(_TRUNCATION_MARK) - 2
            if room < 40:
                break
            truncated = hit.text[:room].rstrip() + _TRUNCATION_MARK
            parts.append(f"\n{header}\n{truncated}")
            break
        return "".join(parts)

    def retrieve_docs(self, ctx: UserContext, query: str, k: int = DEFAULT_K) -> dict[str, Any]:
        if not isinstance(query, str) or not query.strip():
            raise ToolError.invalid_argument("query must be a non-empty string")
        if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= MAX_K:
            raise ToolError.invalid_argument(
                f"k must be an integer in [1, {MAX_K}]", k=k
            )
        if len(self._index) == 0:
            raise ToolError.not_found(
                "no documents have been ingested yet; index a documentation "
                "directory first"
            )
        hits = self.retrieve(query.strip(), k)
        results = []
        for hit in hits:
            entry = hit.to_dict()
            if len(entry["text"]) > _RESULT_TEXT_LIMIT:
                entry["text"] = entry["text"][:_RESULT_TEXT_LIMIT].rstrip() + _TRUNCATION_MARK
            results.append(entry)
        return {
            "query": query.strip(),
            "total_hits": len(hits),
            "results": results,
            "context": self.format_context(hits),
        }


def build_rag_tools(agent: RagAgent) -> list[tuple[ToolDescriptor, ToolHandler]]:
    def handler(ctx: UserContext, args: dict[str, Any]) -> dict[str, Any]:
        return agent.retrieve_docs(ctx, **args)

    return [
        (
            ToolDescriptor(
                name="retrieve_docs",
                description=(
                    "Search the ingested platform documentation and return the "
                    "most relevant passages for a question."
                ),
                parameters={
                    "query": ParamSpec(type="string", required=True),
                    "k": ParamSpec(
                        type="integer",
                        default=DEFAULT_K,
                        description="How many passages to return (1-20).",
                    ),
                },
            ),
            handler,
        ),
    ]
