"""Documentation retrieval agent: ingestion, budgets, tool surface."""

from __future__ import annotations

import numpy as np
import pytest

from swarm_agent.errors import ErrorType, ToolError
from swarm_agent.rag.agent import (
    CONTEXT_BUDGET,
    DEFAULT_K,
    MAX_K,
    RagAgent,
    build_rag_tools,
)
from swarm_agent.rag.embedding import HashEmbedder
from swarm_agent.rag.index import VectorIndex
from swarm_agent.sessions.models import UserContext

from tests.conftest import DOCS_DIR


@pytest.fixture()
def agent():
    return RagAgent(VectorIndex(32), HashEmbedder(32))


@pytest.fixture()
def ctx():
    return UserContext(
        user_id="alice",
        namespace="shared",
        allowed_buckets=frozenset({"mlpipeline"}),
        credential_ref="cred-alice",
    )


LONG_DOC = " ".join(
    f"Sentence number {i} talks about topic {i % 7} in some detail." for i in range(40)
)


class TestConstruction:
    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            RagAgent(VectorIndex(16), HashEmbedder(32))

    def test_index_property(self):
        index = VectorIndex(32)
        assert RagAgent(index, HashEmbedder(32)).index is index


class TestIngestion:
    def test_ingest_document_reports_chunks(self, agent):
        report = agent.ingest_document("guide", LONG_DOC)
        assert report["doc_title"] == "guide"
        assert report["chunks_indexed"] >= 1
        assert len(agent.index) == report["chunks_indexed"]

    def test_reingest_replaces_not_duplicates(self, agent):
        agent.ingest_document("guide", LONG_DOC)
        first = len(agent.index)
        agent.ingest_document("guide", LONG_DOC)
        assert len(agent.index) == first

    def test_empty_title_rejected(self, agent):
        with pytest.raises(ToolError) as exc_info:
            agent.ingest_document("", "Some text.")
        assert exc_info.value.error_type is ErrorType.INVALID_ARGUMENT

    def test_blank_document_rejected(self, agent):
        with pytest.raises(ToolError, match="no text"):
            agent.ingest_document("guide", "   \n\t ")

    def test_ingest_directory_reads_markdown_and_text(self, agent, tmp_path):
        (tmp_path / "a.md").write_text("# Alpha guide\n\nAlpha body text here.")
        (tmp_path / "b.txt").write_text("Beta body text here.")
        (tmp_path / "c.py").write_text("print('skipped')")
        (tmp_path / "nested").mkdir()
        (tmp_path / "nested" / "d.md").write_text("# Delta guide\n\nDelta body.")
        reports = agent.ingest_directory(tmp_path)
        assert [r["doc_title"] for r in reports] == ["Alpha guide", "b", "Delta guide"]
        assert agent.index.doc_titles == ["Alpha guide", "Delta guide", "b"]

    def test_title_from_heading_or_filename(self, agent, tmp_path):
        (tmp_path / "no-heading-file.md").write_text("Body without any heading.")
        reports = agent.ingest_directory(tmp_path)
        assert reports[0]["doc_title"] == "no heading file"

    def test_ingest_directory_rejects_missing_path(self, agent, tmp_path):
        with pytest.raises(ToolError, match="not a directory"):
            agent.ingest_directory(tmp_path / "absent")


class TestFormatContext:
    def test_empty_hits(self, agent):
        assert agent.format_context([]) == "Retrieved context:"

    def test_within_budget_lists_all(self, agent):
        agent.ingest_document("guide", LONG_DOC)
        hits = agent.retrieve("topic 3", k=3)
        block = agent.format_context(hits)
        assert block.startswith("Retrieved context:")
        assert len(block) <= CONTEXT_BUDGET
        for rank in range(1, len(hits) + 1):
            assert f"[{rank}] guide (score " in block

    def test_oversized_chunk_truncated_with_marker(self):
        agent = RagAgent(VectorIndex(32), HashEmbedder(32), context_budget=300)
        agent.ingest_document("guide", LONG_DOC)
        hits = agent.retrieve("topic", k=2)
        block = agent.format_context(hits)
        assert len(block) <= 300
        assert block.endswith("... [truncated]")
        assert "[2]" not in block

    def test_tiny_budget_keeps_header_only(self):
        agent = RagAgent(VectorIndex(32), HashEmbedder(32), context_budget=40)
        agent.ingest_document("guide", LONG_DOC)
        block = agent.format_context(agent.retrieve("topic", k=1))
        assert block == "Retrieved context:"


class TestRetrieveDocs:
    def test_empty_index_is_not_found(self, agent, ctx):
        with pytest.raises(ToolError) as exc_info:
            agent.retrieve_docs(ctx, "anything")
        assert exc_info.value.error_type is ErrorType.NOT_FOUND
        assert "ingested yet" in exc_info.value.message

    @pytest.mark.parametrize("bad_query", ["", "   ", None, 7])
    def test_query_validation(self, agent, ctx, bad_query):
        with pytest.raises(ToolError, match="query"):
            agent.retrieve_docs(ctx, bad_query)

    @pytest.mark.parametrize("bad_k", [0, -1, MAX_K + 1, True, 2.5])
    def test_k_validation(self, agent, ctx, bad_k):
        agent.ingest_document("guide", "Some indexed sentence.")
        with pytest.raises(ToolError, match="k must be"):
            agent.retrieve_docs(ctx, "query", k=bad_k)

    def test_result_shape(self, agent, ctx):
        agent.ingest_document("guide", LONG_DOC)
        payload = agent.retrieve_docs(ctx, "  topic 3  ", k=2)
        assert set(payload) == {"query", "total_hits", "results", "context"}
        assert payload["query"] == "topic 3"
        assert payload["total_hits"] == 2
        assert len(payload["results"]) == 2
        for entry in payload["results"]:
            assert set(entry) == {"score", "chunk_id", "doc_title", "ordinal", "text"}
        assert payload["context"].startswith("Retrieved context:")

    def test_default_k(self, agent, ctx):
        assert DEFAULT_K == 5
        agent.ingest_document("guide", LONG_DOC)
        payload = agent.retrieve_docs(ctx, "topic")
        assert payload["total_hits"] <= 5

    def test_long_result_text_truncated(self, ctx):
        # One giant sentence cannot be split, so the stored chunk exceeds
        # the per-result text limit and must carry the marker.
        agent = RagAgent(VectorIndex(32), HashEmbedder(32))
        agent.ingest_document("guide", "word " * 300 + "end.")
        payload = agent.retrieve_docs(ctx, "word", k=1)
        text = payload["results"][0]["text"]
        assert text.endswith("... [truncated]")
        assert len(text) <= 400 + len(" ... [truncated]")


class TestGoldenRetrieval:
    def test_xyz_classifier_question_hits_its_guide(self, agent, ctx):
        reports = agent.ingest_directory(DOCS_DIR)
        assert len(reports) == 4
        payload = agent.retrieve_docs(
            ctx, "How do I configure the XYZ classifier pipeline?", k=5
        )
        assert payload["results"][0]["doc_title"] == "XYZ classifier guide"
        joined = " ".join(entry["text"] for entry in payload["results"])
        assert "xyz_alpha" in joined or "xyz_alpha" in payload["context"]

    def test_retrieval_matches_exhaustive_scan_over_docs(self, agent, ctx):
        agent.ingest_directory(DOCS_DIR)
        embedder = HashEmbedder(32)
        query = "Where are run artifacts stored?"
        hits = agent.retrieve(query, k=5)
        index = agent.index
        scores = index._matrix @ embedder.embed([query])[0]
        expected = sorted(
            range(len(index._metadata)),
            key=lambda i: (
                -scores[i],
                index._metadata[i]["doc_title"],
                index._metadata[i]["ordinal"],
            ),
        )[:5]
        assert [(h.doc_title, h.ordinal) for h in hits] == [
            (index._metadata[i]["doc_title"], index._metadata[i]["ordinal"])
            for i in expected
        ]


class TestToolSurface:
    def test_single_descriptor(self, agent):
        tools = build_rag_tools(agent)
        assert [d.name for d, _ in tools] == ["retrieve_docs"]
        descriptor = tools[0][0]
        assert descriptor.parameters["query"].required
        assert descriptor.parameters["k"].default == DEFAULT_K

    def test_handler_passthrough(self, agent, ctx):
        agent.ingest_document("guide", LONG_DOC)
        _, handler = build_rag_tools(agent)[0]
        payload = handler(ctx, {"query": "topic 3", "k": 2})
        assert payload["total_hits"] == 2
