"""Document retrieval: semantic chunking, embeddings, exact vector search."""

from swarm_agent.rag.agent import RagAgent, build_rag_tools
from swarm_agent.rag.chunking import ChunkingResult, chunk_text, normalize_body, split_sentences
from swarm_agent.rag.embedding import Embedder, HashEmbedder, HttpEmbedder
from swarm_agent.rag.index import SearchHit, VectorIndex

__all__ = [
    "ChunkingResult",
    "Embedder",
    "HashEmbedder",
    "HttpEmbedder",
    "RagAgent",
    "SearchHit",
    "VectorIndex",
    "build_rag_tools",
    "chunk_text",
    "normalize_body",
    "split_sentences",
]
