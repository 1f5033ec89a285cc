"""Tool-call execution: validation, concurrency, result envelopes.

A batch of calls from one assistant turn runs on a small thread pool;
results return in call order regardless of completion order. Every
outcome, success or failure, becomes a JSON-object content string with a
``status`` field, so the conversation history never carries an unparseable
tool message. Handler crashes are contained as INTERNAL envelopes rather
than taking down the turn.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from swarm_agent.errors import ErrorType, ToolError
from swarm_agent.messages import ToolCall
from swarm_agent.orchestrator.registry import ToolRegistry
from swarm_agent.sessions.models import UserContext

logger = logging.getLogger(__name__)

MAX_BATCH_WORKERS = 4

# Serialized tool content larger than this is replaced by a truncated
# carrier object so a single verbose result cannot flood the context.
MAX_CONTENT_CHARS = 16384


@dataclass(frozen=True)
class ToolResult:
    """Outcome of one tool call, ready to fold into the conversation."""

    call_id: str
    tool_name: str
    content: dict[str, Any]
    serialized: str
    ok: bool
    started_at_s: float
    finished_at_s: float

    @property
    def duration_ms(self) -> float:
        return (self.finished_at_s - self.started_at_s) * 1000.0


def _serialize(content: dict[str, Any]) -> tuple[dict[str, Any], str]:
    serialized = json.dumps(content, ensure_ascii=False)
    if len(serialized) <= MAX_CONTENT_CHARS:
        return content, serialized
    text = serialized[: MAX_CONTENT_CHARS - 200]
    truncated = {
        "status": content.get("status", "ok"),
        "truncated": True,
        "content_text": text,
    }
    out = json.dumps(truncated, ensure_ascii=False)
    # JSON escaping of the embedded text can push the carrier back over
    # the cap; shave the overshoot until it fits.
    while len(out) > MAX_CONTENT_CHARS and text:
        text = text[: -(len(out) - MAX_CONTENT_CHARS)]
        truncated["content_text"] = text
        out = json.dumps(truncated, ensure_ascii=False)
    return truncated, out


def execute_call(registry: ToolRegistry, ctx: UserContext, call: ToolCall) -> ToolResult:
    started = time.monotonic()
    try:
        validated = registry.validate_arguments(call.name, call.arguments)
        tool = registry.get(call.name)
        assert tool is not None  # validate_arguments already rejected unknowns
        payload = tool.handler(ctx, validated)
        if not isinstance(payload, dict):
            raise ToolError.internal(
                f"tool {call.name!r} returned {type(payload).__name__}, expected dict"
            )
        content: dict[str, Any] = {"status": "ok", "result": payload}
        ok = True
    except ToolError as exc:
        content = exc.to_envelope().to_dict()
        ok = False
    except Exception:
        logger.exception("tool %s raised unexpectedly", call.name)
        content = ToolError(
            ErrorType.INTERNAL, f"tool {call.name!r} failed unexpectedly"
        ).to_envelope().to_dict()
        ok = False
    try:
        content, serialized = _serialize(content)
    except (TypeError, ValueError):
        logger.exception("tool %s produced unserializable output", call.name)
        content = ToolError(
            ErrorType.INTERNAL, f"tool {call.name!r} produced unserializable output"
        ).to_envelope().to_dict()
        serialized = json.dumps(content)
        ok = False
    return ToolResult(
        call_id=call.id,
        tool_name=call.name,
        content=content,
        serialized=serialized,
        ok=ok,
        started_at_s=started,
        finished_at_s=time.monotonic(),
    )


def dispatch_batch(
    registry: ToolRegistry,
    ctx: UserContext,
    calls: list[ToolCall],
    max_workers: int = MAX_BATCH_WORKERS,
) -> list[ToolResult]:
    """Run a batch of calls concurrently; results align with ``calls``."""
    if not calls:
        return []
    if len(calls) == 1:
        return [execute_call(registry, ctx, calls[0])]
    workers = max(1, min(max_workers, len(calls)))
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="tool") as pool:
        futures = [pool.submit(execute_call, registry, ctx, call) for call in calls]
        return [f.result() for f in futures]
