"""Turn traces: a structured record of everything one turn did.

Traces capture the reasoning loop at the granularity tests and operators
care about: each model request, each streamed text delta, each tool call
with its timing, and the final outcome. Export is JSON lines, one record
per line, suitable for appending to a trace log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from swarm_agent.messages import isoformat, utcnow

LLM_REQUEST = "llm_request"
TEXT_DELTA = "text_delta"
TOOL_CALL = "tool_call"
TOOL_RESULT = "tool_result"
FINAL = "final"

_KINDS = (LLM_REQUEST, TEXT_DELTA, TOOL_CALL, TOOL_RESULT, FINAL)


@dataclass(frozen=True)
class TraceRecord:
    kind: str
    at: str
    payload: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "at": self.at, **self.payload}


@dataclass
class TurnTrace:
    """Accumulates records for one turn; optionally mirrors to a sink."""

    session_id: str = ""
    records: list[TraceRecord] = field(default_factory=list)
    sink: Callable[[TraceRecord], None] | None = None

    def add(self, kind: str, **payload: Any) -> TraceRecord:
        if kind not in _KINDS:
            raise ValueError(f"unknown trace record kind {kind!r}")
        record = TraceRecord(kind=kind, at=isoformat(utcnow()), payload=payload)
        self.records.append(record)
        if self.sink is not None:
            self.sink(record)
        return record

    def by_kind(self, kind: str) -> list[TraceRecord]:
        return [r for r in self.records if r.kind == kind]

    def export_jsonl(self) -> str:
        lines = []
        for record in self.records:
            out = record.to_dict()
            if self.session_id:
                out["session_id"] = self.session_id
            lines.append(json.dumps(out, ensure_ascii=False))
        return "\n".join(lines) + ("\n" if lines else "")
