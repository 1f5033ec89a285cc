"""LLM gateway: one streaming interface over interchangeable providers.

A provider turns a chat history plus tool descriptors into a stream of
:class:`~swarm_agent.llm.events.LlmEvent`. The production client speaks the
OpenAI-compatible chat-completions protocol; the scripted provider replays a
scenario file for deterministic tests.
"""

from swarm_agent.llm.assembly import AssembledTurn, StreamAssembler, assemble
from swarm_agent.llm.base import (
    CompletionParams,
    ContextOverflow,
    LlmError,
    LlmProvider,
    MalformedStream,
    MatcherMismatch,
    ProviderUnavailable,
    ScriptExhausted,
)
from swarm_agent.llm.events import Finished, FinishReason, LlmEvent, TextDelta, ToolCallDelta
from swarm_agent.llm.openai_client import OpenAIChatClient
from swarm_agent.llm.scripted import ScriptedProvider, load_script

__all__ = [
    "AssembledTurn",
    "CompletionParams",
    "ContextOverflow",
    "Finished",
    "FinishReason",
    "LlmError",
    "LlmEvent",
    "LlmProvider",
    "MalformedStream",
    "MatcherMismatch",
    "OpenAIChatClient",
    "ProviderUnavailable",
    "ScriptExhausted",
    "ScriptedProvider",
    "StreamAssembler",
    "TextDelta",
    "ToolCallDelta",
    "assemble",
    "load_script",
]
