"""Assembles an event stream into one complete assistant turn.

Argument fragments are buffered per call index and parsed exactly once,
when the stream finishes with reason ``tool_calls``. Partial parses are
never exposed. Any stream that breaks the protocol (events after the
terminal, a second terminal, unparseable arguments) raises
:class:`MalformedStream`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from swarm_agent.llm.base import LlmError, MalformedStream
from swarm_agent.llm.events import Finished, FinishReason, LlmEvent, TextDelta, ToolCallDelta
from swarm_agent.messages import ToolCall


@dataclass
class _PartialCall:
    id: str | None = None
    name: str | None = None
    fragments: list[str] = field(default_factory=list)


@dataclass
class AssembledTurn:
    text: str
    tool_calls: list[ToolCall]
    finish_reason: FinishReason


class StreamAssembler:
    """Incremental assembler; feed events as they arrive.

    ``feed`` returns the finished turn when it consumes the terminal event
    and ``None`` before that, so callers can forward deltas live while the
    assembler keeps the bookkeeping.
    """

    def __init__(self) -> None:
        self._text: list[str] = []
        self._calls: dict[int, _PartialCall] = {}
        self._done: AssembledTurn | None = None

    @property
    def finished(self) -> bool:
        return self._done is not None

    def feed(self, event: LlmEvent) -> AssembledTurn | None:
        if self._done is not None:
            raise MalformedStream("event received after the stream terminal")
        if isinstance(event, TextDelta):
            self._text.append(event.text)
            return None
        if isinstance(event, ToolCallDelta):
            partial = self._calls.setdefault(event.index, _PartialCall())
            if event.id is not None:
                partial.id = event.id
            if event.name is not None:
                partial.name = event.name
            if event.arguments_fragment:
                partial.fragments.append(event.arguments_fragment)
            return None
        if isinstance(event, Finished):
            self._done = self._finish(event)
            return self._done
        raise MalformedStream(f"unknown event {event!r}")

    def _finish(self, event: Finished) -> AssembledTurn:
        if event.reason is FinishReason.ERROR:
            if isinstance(event.error, LlmError):
                raise event.error
            raise MalformedStream(str(event.error) if event.error else "provider reported an error")
        calls: list[ToolCall] = []
        if event.reason is FinishReason.TOOL_CALLS:
            if not self._calls:
                raise MalformedStream("finished with tool_calls but no tool call deltas seen")
            for index in sorted(self._calls):
                partial = self._calls[index]
                if not partial.id or not partial.name:
                    raise MalformedStream(f"tool call at index {index} is missing id or name")
                raw = "".join(partial.fragments) or "{}"
                try:
                    arguments = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise MalformedStream(
                        f"arguments for tool call {partial.name!r} do not parse: {exc}"
                    ) from exc
                if not isinstance(arguments, dict):
                    raise MalformedStream(
                        f"arguments for tool call {partial.name!r} are not an object"
                    )
                calls.append(ToolCall(id=partial.id, name=partial.name, arguments=arguments))
            ids = [c.id for c in calls]
            if len(ids) != len(set(ids)):
                raise MalformedStream("duplicate tool call ids in one turn")
        return AssembledTurn(text="".join(self._text), tool_calls=calls, finish_reason=event.reason)


def assemble(events: Iterable[LlmEvent]) -> AssembledTurn:
    """Drain a stream and return the assembled turn.

    Raises MalformedStream if the stream ends without a terminal event or
    yields anything after it.
    """
    assembler = StreamAssembler()
    result: AssembledTurn | None = None
    for event in events:
        result = assembler.feed(event)
    if result is None:
        raise MalformedStream("stream ended without a Finished event")
    return result
