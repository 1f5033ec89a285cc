"""Session stores: in-memory for tests, append-log files for persistence.

Histories are append-only. Every append is atomic (all messages visible or
none) and validated against the tool-call pairing invariant: a batch may
not reference unknown call ids, resolve a call twice, or leave a call
dangling without its result.

File layout: ``sessions/<session_id>.log`` holds one JSON object per line
(line one is the session header, the rest are messages);
``sessions/index.json`` is the session index, rewritten atomically.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from pathlib import Path
from typing import Iterable, Protocol

from swarm_agent.errors import PairingViolation, PermissionDenied, SessionNotFound, StorageUnavailable
from swarm_agent.messages import ChatMessage, Role, isoformat, parse_timestamp, utcnow
from swarm_agent.sessions.models import Session, SessionSummary, UserContext

logger = logging.getLogger(__name__)

_EXCERPT_LEN = 80


def _validate_batch(history: list[ChatMessage], batch: Iterable[ChatMessage]) -> None:
    """Check the pairing invariant for ``history + batch``.

    Raises PairingViolation on an unknown tool_call_id, a duplicate result,
    a reused call id, or a call left without a result at the end of the
    batch.
    """
    seen_call_ids: set[str] = set()
    open_calls: set[str] = set()
    for message in history:
        for call in message.tool_calls:
            seen_call_ids.add(call.id)
            open_calls.add(call.id)
        if message.role is Role.TOOL:
            open_calls.discard(message.tool_call_id)
    for message in batch:
        try:
            message.validate()
        except ValueError as exc:
            raise PairingViolation(str(exc)) from exc
        for call in message.tool_calls:
            if call.id in seen_call_ids:
                raise PairingViolation(f"tool call id {call.id!r} reused")
            seen_call_ids.add(call.id)
            open_calls.add(call.id)
        if message.role is Role.TOOL:
            if message.tool_call_id not in open_calls:
                raise PairingViolation(
                    f"tool result references unknown or resolved call {message.tool_call_id!r}"
                )
            open_calls.discard(message.tool_call_id)
    if open_calls:
        raise PairingViolation(f"batch leaves tool calls without results: {sorted(open_calls)}")


def _first_user_excerpt(history: list[ChatMessage]) -> str:
    for message in history:
        if message.role is Role.USER:
            return message.content[:_EXCERPT_LEN]
    return ""


class SessionStore(Protocol):
    def create_session(self, user: UserContext) -> Session: ...

    def get(self, session_id: str) -> Session: ...

    def append_messages(self, session_id: str, msgs: list[ChatMessage]) -> int: ...

    def get_history(self, session_id: str, caller_user_id: str) -> list[ChatMessage]: ...

    def list_sessions(self, user_id: str) -> list[SessionSummary]: ...


class InMemorySessionStore:
    """Dict-backed store; per-session writes serialized, reads are snapshots."""

    def __init__(self) -> None:
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._global = threading.Lock()

    def create_session(self, user: UserContext) -> Session:
        session = Session(
            session_id=uuid.uuid4().hex,
            thread_id=f"thread-{uuid.uuid4().hex}",
            user=user,
        )
        with self._global:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        return session

    def append_messages(self, session_id: str, msgs: list[ChatMessage]) -> int:
        session = self.get(session_id)
        with self._locks[session_id]:
            _validate_batch(session.history, msgs)
            session.history.extend(msgs)
            session.updated_at = max(utcnow(), session.updated_at)
            return len(session.history)

    def get_history(self, session_id: str, caller_user_id: str) -> list[ChatMessage]:
        session = self.get(session_id)
        if session.user.user_id != caller_user_id:
            raise PermissionDenied(f"session {session_id} is not owned by {caller_user_id}")
        return list(session.history)

    def list_sessions(self, user_id: str) -> list[SessionSummary]:
        out = [
            SessionSummary(
                session_id=s.session_id,
                first_user_excerpt=_first_user_excerpt(s.history),
                updated_at=s.updated_at,
            )
            for s in self._sessions.values()
            if s.user.user_id == user_id
        ]
        out.sort(key=lambda s: (s.updated_at, s.session_id), reverse=True)
        return out


class FileSessionStore:
    """Append-log persistence under ``<root>/sessions``.

    A failed append truncates the log back to its pre-append length, so a
    crash mid-write never leaves a partial batch visible after reload.
    """

    def __init__(self, root: str | Path) -> None:
        self._dir = Path(root) / "sessions"
        try:
            self._dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageUnavailable(f"cannot create session directory: {exc}") from exc
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        # Reentrant: create_session writes the index while already holding it.
        self._global = threading.RLock()
        self._load_all()

    # -- persistence helpers -------------------------------------------------

    def _log_path(self, session_id: str) -> Path:
        return self._dir / f"{session_id}.log"

    def _index_path(self) -> Path:
        return self._dir / "index.json"

    def _load_all(self) -> None:
        for path in sorted(self._dir.glob("*.log")):
            try:
                self._load_one(path)
            except (OSError, json.JSONDecodeError, KeyError) as exc:
                logger.warning("skipping unreadable session log %s: %s", path, exc)

    def _load_one(self, path: Path) -> None:
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines:
            return
        session = Session.from_header(json.loads(lines[0]))
        for line in lines[1:]:
            if not line.strip():
                continue
            session.history.append(ChatMessage.from_dict(json.loads(line)))
        index = self._read_index()
        meta = index.get(session.session_id)
        if meta and "updated_at" in meta:
            session.updated_at = parse_timestamp(meta["updated_at"])
        elif session.history:
            session.updated_at = session.history[-1].created_at
        self._sessions[session.session_id] = session
        self._locks[session.session_id] = threading.Lock()

    def _read_index(self) -> dict:
        try:
            return json.loads(self._index_path().read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return {}

    def _write_index(self) -> None:
        # Appends on different sessions hold only their per-session locks,
        # so the shared index file needs the global lock here.
        with self._global:
            index = {
                s.session_id: {
                    "user_id": s.user.user_id,
                    "thread_id": s.thread_id,
                    "created_at": isoformat(s.created_at),
                    "updated_at": isoformat(s.updated_at),
                    "message_count": len(s.history),
                    "first_user_excerpt": _first_user_excerpt(s.history),
                }
                for s in self._sessions.values()
            }
            tmp = self._index_path().with_suffix(".json.tmp")
            tmp.write_text(json.dumps(index, indent=2), encoding="utf-8")
            os.replace(tmp, self._index_path())

    # -- store API ------------------------------------------------------------

    def create_session(self, user: UserContext) -> Session:
        session = Session(
            session_id=uuid.uuid4().hex,
            thread_id=f"thread-{uuid.uuid4().hex}",
            user=user,
        )
        with self._global:
            try:
                path = self._log_path(session.session_id)
                with open(path, "x", encoding="utf-8") as fh:
                    fh.write(json.dumps(session.header_dict()) + "\n")
                    fh.flush()
                    os.fsync(fh.fileno())
            except OSError as exc:
                raise StorageUnavailable(f"cannot persist session: {exc}") from exc
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()
            self._write_index()
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        return session

    def append_messages(self, session_id: str, msgs: list[ChatMessage]) -> int:
        session = self.get(session_id)
        with self._locks[session_id]:
            _validate_batch(session.history, msgs)
            blob = "".join(json.dumps(m.to_dict()) + "\n" for m in msgs).encode("utf-8")
            path = self._log_path(session_id)
            fd = os.open(path, os.O_WRONLY | os.O_APPEND)
            try:
                offset = os.fstat(fd).st_size
                try:
                    os.write(fd, blob)
                    os.fsync(fd)
                except Exception:
                    os.ftruncate(fd, offset)
                    raise
            finally:
                os.close(fd)
            session.history.extend(msgs)
            session.updated_at = max(utcnow(), session.updated_at)
            self._write_index()
            return len(session.history)

    def get_history(self, session_id: str, caller_user_id: str) -> list[ChatMessage]:
        session = self.get(session_id)
        if session.user.user_id != caller_user_id:
            raise PermissionDenied(f"session {session_id} is not owned by {caller_user_id}")
        return list(session.history)

    def list_sessions(self, user_id: str) -> list[SessionSummary]:
        out = [
            SessionSummary(
                session_id=s.session_id,
                first_user_excerpt=_first_user_excerpt(s.history),
                updated_at=s.updated_at,
            )
            for s in self._sessions.values()
            if s.user.user_id == user_id
        ]
        out.sort(key=lambda s: (s.updated_at, s.session_id), reverse=True)
        return out
