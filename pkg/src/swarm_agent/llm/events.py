"""Streamed LLM events.

A completion stream is a sequence of text and tool-call fragments closed by
exactly one ``Finished`` event. Tool-call argument fragments are raw text;
they are concatenated per call index and parsed once at the end of the
stream, never mid-flight.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union


class FinishReason(str, Enum):
    STOP = "stop"
    TOOL_CALLS = "tool_calls"
    LENGTH = "length"
    ERROR = "error"


@dataclass(frozen=True)
class TextDelta:
    text: str


@dataclass(frozen=True)
class ToolCallDelta:
    """Partial tool call: id/name arrive once per index, arguments in pieces."""

    index: int
    id: str | None = None
    name: str | None = None
    arguments_fragment: str = ""


@dataclass(frozen=True)
class Finished:
    reason: FinishReason
    # Carried for in-band stream failures; surfaced by the assembler.
    error: Exception | None = None


LlmEvent = Union[TextDelta, ToolCallDelta, Finished]
