"""Conversation substrate: chat messages, tool calls, tool descriptors.

These types are shared by the LLM gateway, the orchestrator, and the
session store; they round-trip losslessly through JSON so histories can be
persisted and replayed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any

_TOOL_NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")

PARAM_TYPES = ("string", "number", "integer", "boolean", "object", "array")


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def isoformat(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_timestamp(raw: str) -> datetime:
    return datetime.fromisoformat(raw.replace("Z", "+00:00"))


class Role(str, Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"
    TOOL = "tool"


@dataclass
class ToolCall:
    """One structured call emitted by the model inside an assistant message."""

    id: str
    name: str
    arguments: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name, "arguments": self.arguments}

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> ToolCall:
        return cls(id=raw["id"], name=raw["name"], arguments=dict(raw["arguments"]))


@dataclass
class ChatMessage:
    role: Role
    content: str = ""
    tool_calls: list[ToolCall] = field(default_factory=list)
    tool_call_id: str = ""
    created_at: datetime = field(default_factory=utcnow)

    def validate(self) -> None:
        """Enforce role-specific structure.

        Tool messages must link to a call and carry a serialized tool result;
        only assistant messages may carry tool calls, and call ids must be
        unique within the message.
        """
        if self.role is Role.TOOL:
            if not self.tool_call_id:
                raise ValueError("tool message requires a tool_call_id")
            try:
                parsed = json.loads(self.content)
            except (TypeError, json.JSONDecodeError) as exc:
                raise ValueError("tool message content must be a serialized tool result") from exc
            if not isinstance(parsed, dict) or "status" not in parsed:
                raise ValueError("tool message content must be a serialized tool result")
        if self.tool_calls:
            if self.role is not Role.ASSISTANT:
                raise ValueError(f"{self.role.value} messages cannot carry tool calls")
            ids = [call.id for call in self.tool_calls]
            if len(ids) != len(set(ids)):
                raise ValueError("tool call ids must be unique within a message")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "role": self.role.value,
            "content": self.content,
            "created_at": isoformat(self.created_at),
        }
        if self.tool_calls:
            out["tool_calls"] = [call.to_dict() for call in self.tool_calls]
        if self.tool_call_id:
            out["tool_call_id"] = self.tool_call_id
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> ChatMessage:
        return cls(
            role=Role(raw["role"]),
            content=raw.get("content", ""),
            tool_calls=[ToolCall.from_dict(c) for c in raw.get("tool_calls", [])],
            tool_call_id=raw.get("tool_call_id", ""),
            created_at=parse_timestamp(raw["created_at"]) if "created_at" in raw else utcnow(),
        )


def system(content: str) -> ChatMessage:
    return ChatMessage(role=Role.SYSTEM, content=content)


def user(content: str) -> ChatMessage:
    return ChatMessage(role=Role.USER, content=content)


def assistant(content: str = "", tool_calls: list[ToolCall] | None = None) -> ChatMessage:
    return ChatMessage(role=Role.ASSISTANT, content=content, tool_calls=tool_calls or [])


@dataclass(frozen=True)
class ParamSpec:
    """Schema node for one tool parameter."""

    type: str
    required: bool = False
    default: Any = None
    description: str = ""
    properties: dict[str, ParamSpec] | None = None  # object params
    items: ParamSpec | None = None  # array params

    def __post_init__(self) -> None:
        if self.type not in PARAM_TYPES:
            raise ValueError(f"unknown parameter type {self.type!r}")
        if self.required and self.default is not None:
            raise ValueError("required parameters must not declare a default")

    def to_json_schema(self) -> dict[str, Any]:
        schema: dict[str, Any] = {"type": self.type}
        if self.description:
            schema["description"] = self.description
        if self.default is not None:
            schema["default"] = self.default
        if self.type == "object" and self.properties:
            schema["properties"] = {k: v.to_json_schema() for k, v in self.properties.items()}
            required = [k for k, v in self.properties.items() if v.required]
            if required:
                schema["required"] = required
        if self.type == "array" and self.items is not None:
            schema["items"] = self.items.to_json_schema()
        return schema


@dataclass(frozen=True)
class ToolDescriptor:
    """What the LLM sees for one callable tool."""

    name: str
    description: str
    parameters: dict[str, ParamSpec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not _TOOL_NAME_RE.match(self.name):
            raise ValueError(f"tool name {self.name!r} must match [a-z][a-z0-9_]*")

    def to_json_schema(self) -> dict[str, Any]:
        """OpenAI-style function schema for the wire request."""
        return {
            "type": "function",
            "function": {
                "name": self.name,
                "description": self.description,
                "parameters": {
                    "type": "object",
                    "properties": {k: v.to_json_schema() for k, v in self.parameters.items()},
                    "required": [k for k, v in self.parameters.items() if v.required],
                },
            },
        }
