"""HTTP gateway: sessions, streaming turns, artifact handles.

A turn streams to the client as Server-Sent Events while executing on its
own thread; the thread finishes the turn and persists every produced
message even if the client disconnects mid-stream. One turn per session at
a time: a second concurrent message on the same session is refused with
409 rather than interleaving histories.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
from typing import Any, Iterator

from fastapi import FastAPI, Header, HTTPException, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse

from swarm_agent.errors import (
    ErrorType,
    PermissionDenied,
    SessionNotFound,
    ToolError,
)
from swarm_agent.gateway.auth import AuthError
from swarm_agent.orchestrator.trace import TurnTrace
from swarm_agent.orchestrator.turn import EVENT_ERROR, TurnEvent
from swarm_agent.runtime import Services
from swarm_agent.sessions.models import UserContext

logger = logging.getLogger(__name__)

SSE_MEDIA_TYPE = "text/event-stream"


class TurnGate:
    """At most one in-flight turn per session."""

    def __init__(self) -> None:
        self._busy: set[str] = set()
        self._guard = threading.Lock()

    def acquire(self, session_id: str) -> bool:
        with self._guard:
            if session_id in self._busy:
                return False
            self._busy.add(session_id)
            return True

    def release(self, session_id: str) -> None:
        with self._guard:
            self._busy.discard(session_id)


def sse_frame(event: TurnEvent) -> str:
    return f"event: {event.kind}\ndata: {json.dumps(event.data, ensure_ascii=False)}\n\n"


def create_app(services: Services) -> FastAPI:
    app = FastAPI(title="swarm-agent", docs_url=None, redoc_url=None)
    gate = TurnGate()
    trace_dir = services.config.data_dir / "traces"

    def auth(authorization: str | None) -> UserContext:
        try:
            return services.authenticator.authenticate(authorization)
        except AuthError as exc:
            raise HTTPException(status_code=exc.status_code, detail=exc.detail) from exc

    def owned_session(session_id: str, ctx: UserContext):
        try:
            session = services.session_store.get(session_id)
        except SessionNotFound as exc:
            raise HTTPException(status_code=404, detail=f"no session {session_id}") from exc
        if session.user.user_id != ctx.user_id:
            raise HTTPException(
                status_code=403, detail="session belongs to another user"
            )
        return session

    @app.exception_handler(AuthError)
    async def _auth_error(_request: Request, exc: AuthError) -> JSONResponse:
        return JSONResponse(status_code=exc.status_code, content={"detail": exc.detail})

    # -- sessions ----------------------------------------------------------

    @app.post("/api/sessions", status_code=201)
    def create_session(authorization: str | None = Header(default=None)) -> dict[str, Any]:
        ctx = auth(authorization)
        session = services.session_store.create_session(ctx)
        return {
            "session_id": session.session_id,
            "thread_id": session.thread_id,
            "created_at": session.header_dict()["created_at"],
        }

    @app.get("/api/sessions")
    def list_sessions(authorization: str | None = Header(default=None)) -> dict[str, Any]:
        ctx = auth(authorization)
        summaries = services.session_store.list_sessions(ctx.user_id)
        return {"sessions": [s.to_dict() for s in summaries]}

    @app.get("/api/sessions/{session_id}/history")
    def get_history(
        session_id: str, authorization: str | None = Header(default=None)
    ) -> dict[str, Any]:
        ctx = auth(authorization)
        owned_session(session_id, ctx)
        try:
            history = services.session_store.get_history(session_id, ctx.user_id)
        except PermissionDenied as exc:
            raise HTTPException(status_code=403, detail=str(exc)) from exc
        return {
            "session_id": session_id,
            "messages": [m.to_dict() for m in history],
        }

    # -- turns ----------------------------------------------------------------

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(
        session_id: str,
        body: dict[str, Any],
        authorization: str | None = Header(default=None),
    ) -> StreamingResponse:
        ctx = auth(authorization)
        owned_session(session_id, ctx)
        text = body.get("text") if isinstance(body, dict) else None
        if not isinstance(text, str) or not text.strip():
            raise HTTPException(status_code=400, detail="body must carry non-empty 'text'")
        if not gate.acquire(session_id):
            raise HTTPException(status_code=409, detail="a turn is already running on this session")

        history = services.session_store.get_history(session_id, ctx.user_id)
        events: queue.Queue[TurnEvent | None] = queue.Queue()

        def run_turn() -> None:
            new_messages = []
            trace = TurnTrace(session_id=session_id)
            try:
                for event in services.orchestrator.run_turn(
                    ctx, history, text, new_messages, trace
                ):
                    events.put(event)
            except Exception as exc:  # orchestrator contains its errors; belt and braces
                logger.exception("turn crashed for session %s", session_id)
                events.put(
                    TurnEvent(
                        EVENT_ERROR,
                        {"message": str(exc), "error_kind": type(exc).__name__},
                    )
                )
            finally:
                try:
                    services.session_store.append_messages(session_id, new_messages)
                except Exception:
                    logger.exception("failed to persist turn for session %s", session_id)
                try:
                    trace_dir.mkdir(parents=True, exist_ok=True)
                    with open(trace_dir / f"{session_id}.jsonl", "a", encoding="utf-8") as fh:
                        fh.write(trace.export_jsonl())
                except OSError:
                    logger.exception("failed to write trace for session %s", session_id)
                gate.release(session_id)
                events.put(None)

        worker = threading.Thread(
            target=run_turn, name=f"turn-{session_id[:8]}", daemon=True
        )
        worker.start()

        def stream() -> Iterator[str]:
            # The worker owns persistence; this generator only relays, so a
            # disconnected client cannot abort the turn.
            while True:
                event = events.get()
                if event is None:
                    return
                yield sse_frame(event)

        return StreamingResponse(
            stream(),
            media_type=SSE_MEDIA_TYPE,
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    # -- artifacts ----------------------------------------------------------------

    @app.get("/api/artifacts/{handle}")
    def get_artifact(
        handle: str, authorization: str | None = Header(default=None)
    ) -> Response:
        auth(authorization)
        resolver = getattr(services.object_store, "resolve_handle", None)
        if resolver is None:
            raise HTTPException(
                status_code=404,
                detail="this deployment serves artifacts from remote storage URLs",
            )
        try:
            bucket, key = resolver(handle)
            data = services.object_store.get_object(bucket, key)
            stat = services.object_store.stat_object(bucket, key)  # type: ignore[attr-defined]
        except ToolError as exc:
            status = 404 if exc.error_type is ErrorType.NOT_FOUND else 500
            raise HTTPException(status_code=status, detail=exc.message) from exc
        return Response(content=data, media_type=stat.content_type)

    return app
