"""Conversational MLOps assistant.

An LLM-driven orchestration core routes streamed tool calls to specialized
agents (ML pipelines, object storage, documentation retrieval), folds the
results back into the conversation, and iterates until a final answer.
"""

__version__ = "0.1.0"
