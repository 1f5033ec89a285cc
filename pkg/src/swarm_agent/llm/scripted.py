"""Deterministic scripted provider for replayable tests.

A scenario file scripts the LLM side of a conversation as ordered steps.
Each step pairs a matcher (predicate on the latest user message and/or the
pending tool results) with a response (text and/or tool calls). Steps are
consumed strictly in order; a conversation that diverges from the script is
an error, never a silent fallthrough.

Scenario format::

    {"steps": [
        {"match": {"last_user_contains": "...", "awaiting_tool": true,
                   "last_tool_contains": "..."},
         "respond": {"text": "...", "tool_calls": [{"name": "...", "arguments": {...}}]},
         "repeat": false}
    ]}

``repeat: true`` pins the cursor on a step, which lets a two-line script
drive an unbounded tool loop (used to exercise iteration limits).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence

from swarm_agent.llm.base import CompletionParams, MatcherMismatch, ScriptExhausted
from swarm_agent.llm.events import Finished, FinishReason, LlmEvent, TextDelta, ToolCallDelta
from swarm_agent.messages import ChatMessage, Role, ToolDescriptor

_TEXT_CHUNK = 13
_ARGS_CHUNK = 7


@dataclass(frozen=True)
class ScriptedCall:
    name: str
    arguments: dict[str, Any]


@dataclass(frozen=True)
class ScriptStep:
    match: dict[str, Any]
    text: str = ""
    tool_calls: tuple[ScriptedCall, ...] = ()
    repeat: bool = False

    def matches(self, history: Sequence[ChatMessage]) -> str | None:
        """Return a mismatch description, or None when the step matches."""
        if "awaiting_tool" in self.match:
            awaiting = bool(history) and history[-1].role is Role.TOOL
            if awaiting != bool(self.match["awaiting_tool"]):
                return f"awaiting_tool={awaiting}, expected {self.match['awaiting_tool']}"
        if "last_user_contains" in self.match:
            needle = str(self.match["last_user_contains"]).lower()
            last_user = next((m for m in reversed(history) if m.role is Role.USER), None)
            if last_user is None or needle not in last_user.content.lower():
                return f"last user message does not contain {needle!r}"
        if "last_tool_contains" in self.match:
            needle = str(self.match["last_tool_contains"])
            tool_block = [m for m in reversed(history) if m.role is Role.TOOL]
            if not any(needle in m.content for m in tool_block):
                return f"no pending tool result contains {needle!r}"
        return None


@dataclass
class Script:
    steps: list[ScriptStep] = field(default_factory=list)


def load_script(source: str | Path | dict[str, Any]) -> Script:
    """Parse a scenario from a path, JSON text, or an already-decoded dict."""
    if isinstance(source, dict):
        raw = source
    elif isinstance(source, Path):
        raw = json.loads(source.read_text(encoding="utf-8"))
    elif str(source).lstrip().startswith("{"):
        raw = json.loads(str(source))
    else:
        raw = json.loads(Path(str(source)).read_text(encoding="utf-8"))
    steps = []
    for i, step in enumerate(raw.get("steps", [])):
        respond = step.get("respond") or {}
        calls = tuple(
            ScriptedCall(name=c["name"], arguments=dict(c.get("arguments") or {}))
            for c in respond.get("tool_calls", [])
        )
        if not respond.get("text") and not calls:
            raise ValueError(f"script step {i} has an empty response")
        steps.append(
            ScriptStep(
                match=dict(step.get("match") or {}),
                text=respond.get("text", ""),
                tool_calls=calls,
                repeat=bool(step.get("repeat", False)),
            )
        )
    if not steps:
        raise ValueError("script has no steps")
    return Script(steps=steps)


def _chunks(text: str, size: int) -> Iterator[str]:
    for i in range(0, len(text), size):
        yield text[i : i + size]


class ScriptedProvider:
    """Replays a scenario step per completion request.

    The cursor advances globally and under a lock, so a shared handle stays
    consistent across concurrent turns. Streams are generated with fixed
    fragment sizes, making replays byte-identical.
    """

    def __init__(self, script: Script) -> None:
        self._script = script
        self._cursor = 0
        self._turn = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> ScriptedProvider:
        return cls(load_script(Path(path)))

    def reset(self) -> None:
        with self._lock:
            self._cursor = 0
            self._turn = 0

    @property
    def steps_consumed(self) -> int:
        return self._cursor

    def complete_streaming(
        self,
        history: Sequence[ChatMessage],
        tools: Sequence[ToolDescriptor],
        params: CompletionParams,
    ) -> Iterator[LlmEvent]:
        with self._lock:
            turn = self._turn
            self._turn += 1
            if self._cursor >= len(self._script.steps):
                error: Exception = ScriptExhausted(
                    f"script has {len(self._script.steps)} steps; turn {turn + 1} requested"
                )
                return iter([Finished(FinishReason.ERROR, error=error)])
            step = self._script.steps[self._cursor]
            mismatch = step.matches(history)
            if mismatch is not None:
                error = MatcherMismatch(f"script step {self._cursor} did not match: {mismatch}")
                return iter([Finished(FinishReason.ERROR, error=error)])
            if not step.repeat:
                self._cursor += 1
        return self._stream(step, turn)

    def _stream(self, step: ScriptStep, turn: int) -> Iterator[LlmEvent]:
        for piece in _chunks(step.text, _TEXT_CHUNK):
            yield TextDelta(piece)
        for index, call in enumerate(step.tool_calls):
            call_id = f"call_{turn:04d}_{index}"
            yield ToolCallDelta(index=index, id=call_id, name=call.name)
            payload = json.dumps(call.arguments, separators=(",", ":"))
            for fragment in _chunks(payload, _ARGS_CHUNK):
                yield ToolCallDelta(index=index, arguments_fragment=fragment)
        if step.tool_calls:
            yield Finished(FinishReason.TOOL_CALLS)
        else:
            yield Finished(FinishReason.STOP)
