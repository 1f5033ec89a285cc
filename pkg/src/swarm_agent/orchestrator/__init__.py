"""Reasoning loop, tool registry, dispatch, and turn tracing."""

from swarm_agent.orchestrator.dispatch import (
    MAX_CONTENT_CHARS,
    ToolResult,
    dispatch_batch,
    execute_call,
)
from swarm_agent.orchestrator.registry import (
    AGENT_TAGS,
    RegisteredTool,
    ToolHandler,
    ToolRegistry,
)
from swarm_agent.orchestrator.trace import TraceRecord, TurnTrace
from swarm_agent.orchestrator.turn import (
    EVENT_ERROR,
    EVENT_FINAL,
    EVENT_TOKEN,
    EVENT_TOOL_CALL,
    EVENT_TOOL_RESULT,
    Orchestrator,
    TRUNCATION_NOTICE,
    TurnEvent,
    load_system_template,
    render_system_prompt,
)

__all__ = [
    "AGENT_TAGS",
    "EVENT_ERROR",
    "EVENT_FINAL",
    "EVENT_TOKEN",
    "EVENT_TOOL_CALL",
    "EVENT_TOOL_RESULT",
    "MAX_CONTENT_CHARS",
    "Orchestrator",
    "RegisteredTool",
    "ToolHandler",
    "ToolRegistry",
    "ToolResult",
    "TraceRecord",
    "TRUNCATION_NOTICE",
    "TurnEvent",
    "TurnTrace",
    "dispatch_batch",
    "execute_call",
    "load_system_template",
    "render_system_prompt",
]
