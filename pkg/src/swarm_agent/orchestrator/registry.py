"""Tool registry: descriptors, handlers, and argument validation.

Validation happens before any handler runs, so handlers can trust their
inputs: required parameters present, declared defaults applied, no unknown
keys, JSON types matching the descriptor. Violations surface as
INVALID_ARGUMENT naming the offending key, which the model can act on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from swarm_agent.errors import DuplicateTool, ToolError
from swarm_agent.messages import ParamSpec, ToolDescriptor
from swarm_agent.sessions.models import UserContext

ToolHandler = Callable[[UserContext, dict[str, Any]], dict[str, Any]]

AGENT_TAGS = ("kfp", "minio", "rag")

_TYPE_CHECKS: dict[str, Callable[[Any], bool]] = {
    "string": lambda v: isinstance(v, str),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
}


@dataclass(frozen=True)
class RegisteredTool:
    descriptor: ToolDescriptor
    handler: ToolHandler
    agent_tag: str


class ToolRegistry:
    def __init__(self) -> None:
        self._tools: dict[str, RegisteredTool] = {}

    def register(self, descriptor: ToolDescriptor, handler: ToolHandler, agent_tag: str) -> None:
        if agent_tag not in AGENT_TAGS:
            raise ValueError(f"unknown agent tag {agent_tag!r}; expected one of {AGENT_TAGS}")
        if descriptor.name in self._tools:
            raise DuplicateTool(f"tool {descriptor.name!r} is already registered")
        self._tools[descriptor.name] = RegisteredTool(
            descriptor=descriptor, handler=handler, agent_tag=agent_tag
        )

    def register_all(
        self,
        tools: list[tuple[ToolDescriptor, ToolHandler]],
        agent_tag: str,
    ) -> None:
        for descriptor, handler in tools:
            self.register(descriptor, handler, agent_tag)

    def get(self, name: str) -> RegisteredTool | None:
        return self._tools.get(name)

    def names(self) -> list[str]:
        return list(self._tools)

    def descriptors(self) -> list[ToolDescriptor]:
        return [t.descriptor for t in self._tools.values()]

    def __len__(self) -> int:
        return len(self._tools)

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def validate_arguments(self, name: str, arguments: dict[str, Any]) -> dict[str, Any]:
        """Check arguments against the descriptor; returns a new dict with
        declared defaults filled in."""
        tool = self._tools.get(name)
        if tool is None:
            raise ToolError.invalid_argument(
                f"unknown tool {name!r}", available_tools=self.names()
            )
        if not isinstance(arguments, dict):
            raise ToolError.invalid_argument(
                f"arguments for {name!r} must be an object"
            )
        spec = tool.descriptor.parameters
        unknown = sorted(k for k in arguments if k not in spec)
        if unknown:
            raise ToolError.invalid_argument(
                f"unknown argument {unknown[0]!r} for tool {name!r}",
                unknown_arguments=unknown,
                valid_arguments=sorted(spec),
            )
        validated: dict[str, Any] = {}
        missing = []
        for key, param in spec.items():
            if key in arguments:
                value = arguments[key]
                if not _TYPE_CHECKS[param.type](value):
                    raise ToolError.invalid_argument(
                        f"argument {key!r} of tool {name!r} expects {param.type}, "
                        f"got {type(value).__name__}",
                        argument=key,
                        expected_type=param.type,
                    )
                validated[key] = value
            elif param.required:
                missing.append(key)
            elif param.default is not None:
                validated[key] = param.default
        if missing:
            raise ToolError.invalid_argument(
                f"tool {name!r} is missing required arguments: {', '.join(missing)}",
                missing_arguments=missing,
            )
        return validated


__all__ = [
    "AGENT_TAGS",
    "ParamSpec",
    "RegisteredTool",
    "ToolHandler",
    "ToolRegistry",
]
