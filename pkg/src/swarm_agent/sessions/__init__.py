"""Persistent per-session conversational state with user auth context."""

from swarm_agent.sessions.models import (
    SHARED_NAMESPACE,
    Session,
    SessionSummary,
    UserContext,
)
from swarm_agent.sessions.store import FileSessionStore, InMemorySessionStore, SessionStore

__all__ = [
    "FileSessionStore",
    "InMemorySessionStore",
    "SHARED_NAMESPACE",
    "Session",
    "SessionStore",
    "SessionSummary",
    "UserContext",
]
