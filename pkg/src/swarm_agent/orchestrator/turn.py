"""The reasoning loop: stream, detect tool calls, dispatch, repeat.

One turn takes the user's message, streams a model response, and loops:
tool calls are validated and dispatched (concurrently within a batch),
their results are folded back into the conversation, and the model is
asked again, until it answers in plain text or the iteration cap stops a
runaway loop. Callers consume the turn as an event stream; every new
message the turn produced is also collected for persistence.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from importlib import resources
from string import Template
from typing import Any, Callable, Iterator

from swarm_agent.llm.assembly import AssembledTurn, StreamAssembler
from swarm_agent.llm.base import CompletionParams, LlmError, LlmProvider, ProviderUnavailable
from swarm_agent.llm.events import FinishReason, TextDelta
from swarm_agent.messages import ChatMessage, Role, assistant, system, user
from swarm_agent.orchestrator.dispatch import dispatch_batch
from swarm_agent.orchestrator.registry import ToolRegistry
from swarm_agent.orchestrator import trace as trace_mod
from swarm_agent.orchestrator.trace import TurnTrace
from swarm_agent.sessions.models import UserContext

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERATIONS = 8
DEFAULT_CONTEXT_BUDGET = 24000
_RETRY_DELAYS_S = (0.25, 1.0)

# Wire-visible event kinds.
EVENT_TOKEN = "token"
EVENT_TOOL_CALL = "tool_call"
EVENT_TOOL_RESULT = "tool_result"
EVENT_FINAL = "final"
EVENT_ERROR = "error"

TRUNCATION_NOTICE = (
    "I stopped after reaching the tool-call limit for one turn. Here is "
    "what I have so far; ask again to continue."
)


@dataclass(frozen=True)
class TurnEvent:
    kind: str
    data: dict[str, Any]


def load_system_template() -> str:
    return (
        resources.files("swarm_agent.orchestrator")
        .joinpath("templates/system_prompt.txt")
        .read_text(encoding="utf-8")
    )


def render_system_prompt(template: str, ctx: UserContext) -> str:
    buckets = ", ".join(sorted(ctx.allowed_buckets)) or "(none)"
    return Template(template).substitute(
        user_id=ctx.user_id, namespace=ctx.namespace, buckets=buckets
    )


def _block_spans(messages: list[ChatMessage]) -> list[tuple[int, int]]:
    """Split history into indivisible blocks: one message each, except an
    assistant tool-call message which holds on to its tool results."""
    spans: list[tuple[int, int]] = []
    i = 0
    while i < len(messages):
        j = i + 1
        if messages[i].role is Role.ASSISTANT and messages[i].tool_calls:
            while j < len(messages) and messages[j].role is Role.TOOL:
                j += 1
        spans.append((i, j))
        i = j
    return spans


def _message_cost(message: ChatMessage) -> int:
    cost = len(message.content) + 32
    for call in message.tool_calls:
        cost += len(call.name) + len(str(call.arguments)) + 16
    return cost


class Orchestrator:
    def __init__(
        self,
        provider: LlmProvider,
        registry: ToolRegistry,
        model: str = "default",
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
        batch_concurrency: int = 4,
        context_char_budget: int = DEFAULT_CONTEXT_BUDGET,
        system_template: str | None = None,
        sleep_fn: Callable[[float], None] = time.sleep,
    ) -> None:
        if max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        self._provider = provider
        self._registry = registry
        self._model = model
        self._max_iterations = max_iterations
        self._batch_concurrency = batch_concurrency
        self._context_budget = context_char_budget
        self._template = system_template if system_template is not None else load_system_template()
        self._sleep = sleep_fn

    # -- context construction -------------------------------------------------

    def build_context(self, ctx: UserContext, history: list[ChatMessage]) -> list[ChatMessage]:
        """System prompt plus as much recent history as fits the budget.

        Trimming drops whole blocks from the oldest end; an assistant
        tool-call message and its results are one block, so the model never
        sees a call without its result or vice versa. The newest block is
        always kept.
        """
        prompt = system(render_system_prompt(self._template, ctx))
        spans = _block_spans(history)
        costs = [sum(_message_cost(m) for m in history[a:b]) for a, b in spans]
        keep_from = 0
        total = sum(costs)
        while keep_from < len(spans) - 1 and total > self._context_budget:
            total -= costs[keep_from]
            keep_from += 1
        kept: list[ChatMessage] = []
        for a, b in spans[keep_from:]:
            kept.extend(history[a:b])
        return [prompt, *kept]

    # -- the loop -----------------------------------------------------------------

    def run_turn(
        self,
        ctx: UserContext,
        history: list[ChatMessage],
        user_text: str,
        new_messages: list[ChatMessage],
        trace: TurnTrace | None = None,
    ) -> Iterator[TurnEvent]:
        """Run one turn; yields wire events and fills ``new_messages``.

        ``history`` is the conversation before this turn and is not
        modified. ``new_messages`` receives the user message and everything
        the turn produced, in order, ready for appending to the session.
        """
        trace = trace or TurnTrace()
        user_message = user(user_text)
        new_messages.append(user_message)
        working = [*history, user_message]

        for iteration in range(self._max_iterations):
            context = self.build_context(ctx, working)
            trace.add(
                trace_mod.LLM_REQUEST,
                iteration=iteration,
                message_count=len(context),
                tool_count=len(self._registry),
            )
            holder: list[AssembledTurn] = []
            try:
                yield from self._stream_completion(context, trace, holder)
            except LlmError as exc:
                logger.warning("turn aborted by provider error: %s", exc)
                trace.add(trace_mod.FINAL, error=str(exc), error_kind=type(exc).__name__)
                yield TurnEvent(
                    EVENT_ERROR,
                    {"message": str(exc), "error_kind": type(exc).__name__},
                )
                return
            assembled = holder[0]

            if assembled.finish_reason is not FinishReason.TOOL_CALLS:
                message = assistant(assembled.text)
                new_messages.append(message)
                working.append(message)
                trace.add(trace_mod.FINAL, text=assembled.text, iterations=iteration + 1)
                yield TurnEvent(
                    EVENT_FINAL, {"text": assembled.text, "iterations": iteration + 1}
                )
                return

            call_message = assistant(assembled.text, tool_calls=assembled.tool_calls)
            new_messages.append(call_message)
            working.append(call_message)
            for call in assembled.tool_calls:
                trace.add(
                    trace_mod.TOOL_CALL,
                    iteration=iteration,
                    call_id=call.id,
                    name=call.name,
                    arguments=call.arguments,
                )
                yield TurnEvent(
                    EVENT_TOOL_CALL,
                    {"call_id": call.id, "name": call.name, "arguments": call.arguments},
                )
            results = dispatch_batch(
                self._registry, ctx, assembled.tool_calls, self._batch_concurrency
            )
            for result in results:
                trace.add(
                    trace_mod.TOOL_RESULT,
                    iteration=iteration,
                    call_id=result.call_id,
                    name=result.tool_name,
                    status=result.content.get("status"),
                    started_at_s=result.started_at_s,
                    finished_at_s=result.finished_at_s,
                    duration_ms=result.duration_ms,
                )
                tool_message = ChatMessage(
                    role=Role.TOOL,
                    content=result.serialized,
                    tool_call_id=result.call_id,
                )
                new_messages.append(tool_message)
                working.append(tool_message)
                yield TurnEvent(
                    EVENT_TOOL_RESULT,
                    {
                        "call_id": result.call_id,
                        "name": result.tool_name,
                        "content": result.content,
                    },
                )

        message = assistant(TRUNCATION_NOTICE)
        new_messages.append(message)
        trace.add(
            trace_mod.FINAL,
            text=TRUNCATION_NOTICE,
            iterations=self._max_iterations,
            truncated=True,
        )
        yield TurnEvent(
            EVENT_FINAL,
            {
                "text": TRUNCATION_NOTICE,
                "iterations": self._max_iterations,
                "truncated": True,
            },
        )

    # -- provider interaction ----------------------------------------------------

    def _stream_completion(
        self,
        context: list[ChatMessage],
        trace: TurnTrace,
        holder: list[AssembledTurn],
    ) -> Iterator[TurnEvent]:
        """Stream one completion, yielding token events as they arrive.

        The assembled turn lands in ``holder``. Connection failures retry
        with backoff only while nothing has been yielded; once the client
        saw tokens, a broken stream is not silently replayable and the
        error propagates.
        """
        params = CompletionParams(model=self._model)
        descriptors = self._registry.descriptors()
        attempt = 0
        while True:
            assembler = StreamAssembler()
            assembled: AssembledTurn | None = None
            yielded = False
            try:
                for event in self._provider.complete_streaming(context, descriptors, params):
                    if isinstance(event, TextDelta) and event.text:
                        trace.add(trace_mod.TEXT_DELTA, text=event.text)
                        yielded = True
                        yield TurnEvent(EVENT_TOKEN, {"text": event.text})
                    result = assembler.feed(event)
                    if result is not None:
                        assembled = result
                if assembled is None:
                    raise ProviderUnavailable("stream ended without a terminal event")
                holder.append(assembled)
                return
            except ProviderUnavailable:
                if yielded or attempt >= len(_RETRY_DELAYS_S):
                    raise
                self._sleep(_RETRY_DELAYS_S[attempt])
                attempt += 1
