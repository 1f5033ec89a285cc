"""Shared error taxonomy.

Agent operations raise :class:`ToolError`; the dispatcher converts those to
:class:`ErrorEnvelope` values that travel back to the LLM as serializable
tool results, so the model can adjust arguments and retry where that makes
sense.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class ErrorType(str, Enum):
    INVALID_ARGUMENT = "INVALID_ARGUMENT"
    NOT_FOUND = "NOT_FOUND"
    PERMISSION_DENIED = "PERMISSION_DENIED"
    BACKEND_UNAVAILABLE = "BACKEND_UNAVAILABLE"
    INTERNAL = "INTERNAL"


# Error types the LLM may retry after adjusting its input. All other types
# are final for the current arguments.
_RETRYABLE_TYPES = frozenset({ErrorType.INVALID_ARGUMENT, ErrorType.BACKEND_UNAVAILABLE})


@dataclass(frozen=True)
class ErrorEnvelope:
    """Serializable error value embedded in a failed tool result."""

    error_type: ErrorType
    message: str
    retryable: bool
    details: dict[str, Any] = field(default_factory=dict)
    status: str = "error"

    def __post_init__(self) -> None:
        if not self.message:
            raise ValueError("ErrorEnvelope.message must be non-empty")
        if self.retryable and self.error_type not in _RETRYABLE_TYPES:
            raise ValueError(
                f"retryable envelopes are only allowed for {sorted(t.value for t in _RETRYABLE_TYPES)}, "
                f"got {self.error_type.value}"
            )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "status": self.status,
            "error_type": self.error_type.value,
            "message": self.message,
            "retryable": self.retryable,
        }
        if self.details:
            out["details"] = self.details
        return out

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> ErrorEnvelope:
        return cls(
            error_type=ErrorType(raw["error_type"]),
            message=raw["message"],
            retryable=bool(raw["retryable"]),
            details=dict(raw.get("details") or {}),
        )


class ToolError(Exception):
    """Raised by agent operations; carries everything the envelope needs.

    ``retryable`` defaults to the natural value for the error type and may
    only be narrowed (a type that is never retryable cannot be forced on).
    """

    def __init__(
        self,
        error_type: ErrorType,
        message: str,
        *,
        retryable: bool | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.error_type = error_type
        self.message = message
        self.retryable = (error_type in _RETRYABLE_TYPES) if retryable is None else retryable
        self.details = details or {}

    def to_envelope(self) -> ErrorEnvelope:
        return ErrorEnvelope(
            error_type=self.error_type,
            message=self.message,
            retryable=self.retryable and self.error_type in _RETRYABLE_TYPES,
            details=self.details,
        )

    @classmethod
    def invalid_argument(cls, message: str, **details: Any) -> ToolError:
        return cls(ErrorType.INVALID_ARGUMENT, message, details=details)

    @classmethod
    def not_found(cls, message: str, **details: Any) -> ToolError:
        return cls(ErrorType.NOT_FOUND, message, details=details)

    @classmethod
    def permission_denied(cls, message: str, **details: Any) -> ToolError:
        return cls(ErrorType.PERMISSION_DENIED, message, details=details)

    @classmethod
    def backend_unavailable(cls, message: str, **details: Any) -> ToolError:
        return cls(ErrorType.BACKEND_UNAVAILABLE, message, details=details)

    @classmethod
    def internal(cls, message: str, **details: Any) -> ToolError:
        return cls(ErrorType.INTERNAL, message, details=details)


class SwarmError(Exception):
    """Base for non-tool service errors (sessions, registry, gateway)."""


class SessionNotFound(SwarmError):
    pass


class SessionBusy(SwarmError):
    pass


class PermissionDenied(SwarmError):
    pass


class PairingViolation(SwarmError):
    pass


class StorageUnavailable(SwarmError):
    pass


class DuplicateTool(SwarmError):
    pass
