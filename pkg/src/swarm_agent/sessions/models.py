"""Session domain types."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any

from swarm_agent.errors import ToolError
from swarm_agent.messages import ChatMessage, isoformat, parse_timestamp, utcnow

# Resources in this namespace are readable by every user; writes still
# require an exact namespace match.
SHARED_NAMESPACE = "shared"


@dataclass(frozen=True)
class UserContext:
    """Per-user backend scoping: namespace, bucket grants, credential handle.

    ``credential_ref`` is an opaque handle resolved by backend clients via
    gateway configuration; it must never be serialized into chat content.
    """

    user_id: str
    namespace: str
    allowed_buckets: frozenset[str] = frozenset()
    credential_ref: str = ""

    def __post_init__(self) -> None:
        if not self.user_id:
            raise ValueError("user_id must be non-empty")
        if not self.namespace:
            raise ValueError("namespace must be non-empty")
        if not isinstance(self.allowed_buckets, frozenset):
            object.__setattr__(self, "allowed_buckets", frozenset(self.allowed_buckets))

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "namespace": self.namespace,
            "allowed_buckets": sorted(self.allowed_buckets),
            "credential_ref": self.credential_ref,
        }

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> UserContext:
        return cls(
            user_id=raw["user_id"],
            namespace=raw["namespace"],
            allowed_buckets=frozenset(raw.get("allowed_buckets", [])),
            credential_ref=raw.get("credential_ref", ""),
        )

    def can_read(self, namespace: str) -> bool:
        return namespace == self.namespace or namespace == SHARED_NAMESPACE

    def check_read(self, namespace: str, resource: str) -> None:
        if not self.can_read(namespace):
            raise ToolError.permission_denied(
                f"{resource} belongs to namespace {namespace!r}, which is not "
                f"readable from namespace {self.namespace!r}",
                resource=resource,
            )

    def check_write(self, namespace: str, resource: str) -> None:
        if namespace != self.namespace:
            raise ToolError.permission_denied(
                f"{resource} belongs to namespace {namespace!r}; writes are "
                f"only allowed in your own namespace {self.namespace!r}",
                resource=resource,
            )


@dataclass
class Session:
    session_id: str
    thread_id: str
    user: UserContext
    history: list[ChatMessage] = field(default_factory=list)
    created_at: datetime = field(default_factory=utcnow)
    updated_at: datetime = field(default_factory=utcnow)

    def header_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "thread_id": self.thread_id,
            "user": self.user.to_dict(),
            "created_at": isoformat(self.created_at),
        }

    @classmethod
    def from_header(cls, raw: dict[str, Any]) -> Session:
        created = parse_timestamp(raw["created_at"])
        return cls(
            session_id=raw["session_id"],
            thread_id=raw["thread_id"],
            user=UserContext.from_dict(raw["user"]),
            created_at=created,
            updated_at=created,
        )


@dataclass(frozen=True)
class SessionSummary:
    session_id: str
    first_user_excerpt: str
    updated_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "first_user_excerpt": self.first_user_excerpt,
            "updated_at": isoformat(self.updated_at),
        }
