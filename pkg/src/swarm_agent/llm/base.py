"""Provider contract and gateway-level errors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Protocol, Sequence

from swarm_agent.llm.events import LlmEvent
from swarm_agent.messages import ChatMessage, ToolDescriptor


class LlmError(Exception):
    pass


class ProviderUnavailable(LlmError):
    """Network or HTTP failure; safe to retry the whole request."""


class MalformedStream(LlmError):
    """Protocol violation in the event stream; not retryable."""


class MatcherMismatch(MalformedStream):
    """Scripted conversation diverged from the scenario file."""


class ScriptExhausted(MalformedStream):
    """More turns requested than the scenario file scripts."""


class ContextOverflow(LlmError):
    """History exceeds the provider limit; the caller must trim."""


@dataclass(frozen=True)
class CompletionParams:
    model: str = "default"
    temperature: float = 0.0
    max_output_tokens: int | None = None


class LlmProvider(Protocol):
    """An LLM with function calling behind one streaming call.

    Providers are shareable across concurrent turns; every call returns an
    independent stream with no cross-stream state.
    """

    def complete_streaming(
        self,
        history: Sequence[ChatMessage],
        tools: Sequence[ToolDescriptor],
        params: CompletionParams,
    ) -> Iterator[LlmEvent]:
        ...
