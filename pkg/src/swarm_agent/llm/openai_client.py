"""Production client for the OpenAI-compatible chat-completions protocol.

Speaks the streamed (chunked SSE) variant of ``POST /chat/completions``.
Endpoint, model, and API key come from configuration or the environment
(``SWARM_LLM_ENDPOINT``, ``SWARM_LLM_MODEL``, ``SWARM_LLM_API_KEY``).

Connection-level failures raise :class:`ProviderUnavailable` before the
stream starts; mid-stream failures surface in-band as a terminal error
event so consumers always see exactly one ``Finished``.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Any, Iterator, Sequence

import requests

from swarm_agent.llm.base import (
    CompletionParams,
    ContextOverflow,
    MalformedStream,
    ProviderUnavailable,
)
from swarm_agent.llm.events import Finished, FinishReason, LlmEvent, TextDelta, ToolCallDelta
from swarm_agent.messages import ChatMessage, Role, ToolDescriptor

logger = logging.getLogger(__name__)

_FINISH_REASONS = {
    "stop": FinishReason.STOP,
    "tool_calls": FinishReason.TOOL_CALLS,
    "length": FinishReason.LENGTH,
}


def _wire_message(message: ChatMessage) -> dict[str, Any]:
    out: dict[str, Any] = {"role": message.role.value, "content": message.content}
    if message.role is Role.ASSISTANT and message.tool_calls:
        out["tool_calls"] = [
            {
                "id": call.id,
                "type": "function",
                "function": {
                    "name": call.name,
                    "arguments": json.dumps(call.arguments, separators=(",", ":")),
                },
            }
            for call in message.tool_calls
        ]
        if not message.content:
            out["content"] = None
    if message.role is Role.TOOL:
        out["tool_call_id"] = message.tool_call_id
    return out


class OpenAIChatClient:
    """Thin streaming client; one HTTP request per completion call."""

    def __init__(
        self,
        endpoint: str | None = None,
        model: str | None = None,
        api_key: str | None = None,
        *,
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ) -> None:
        self.endpoint = (endpoint or os.environ.get("SWARM_LLM_ENDPOINT", "")).rstrip("/")
        self.model = model or os.environ.get("SWARM_LLM_MODEL", "")
        self.api_key = api_key or os.environ.get("SWARM_LLM_API_KEY", "")
        self.timeout = timeout
        self._session = session or requests.Session()
        if not self.endpoint:
            raise ValueError("LLM endpoint is not configured (SWARM_LLM_ENDPOINT)")

    def complete_streaming(
        self,
        history: Sequence[ChatMessage],
        tools: Sequence[ToolDescriptor],
        params: CompletionParams,
    ) -> Iterator[LlmEvent]:
        if not history:
            raise ValueError("history must be non-empty")
        if history[0].role not in (Role.SYSTEM, Role.USER):
            raise ValueError("first message must have role system or user")
        body: dict[str, Any] = {
            "model": params.model or self.model,
            "messages": [_wire_message(m) for m in history],
            "temperature": params.temperature,
            "stream": True,
        }
        if params.max_output_tokens is not None:
            body["max_tokens"] = params.max_output_tokens
        if tools:
            body["tools"] = [t.to_json_schema() for t in tools]

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        try:
            response = self._session.post(
                f"{self.endpoint}/chat/completions",
                json=body,
                headers=headers,
                stream=True,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"request failed: {exc}") from exc
        if response.status_code >= 500:
            raise ProviderUnavailable(f"provider returned HTTP {response.status_code}")
        if response.status_code == 400 and b"context" in response.content[:2048].lower():
            raise ContextOverflow(response.text[:500])
        if response.status_code != 200:
            raise ProviderUnavailable(
                f"provider returned HTTP {response.status_code}: {response.text[:500]}"
            )
        return self._stream(response)

    def _stream(self, response: requests.Response) -> Iterator[LlmEvent]:
        finished = False
        try:
            for line in response.iter_lines(decode_unicode=True):
                if not line or not line.startswith("data:"):
                    continue
                payload = line[len("data:") :].strip()
                if payload == "[DONE]":
                    break
                try:
                    chunk = json.loads(payload)
                except json.JSONDecodeError as exc:
                    yield Finished(
                        FinishReason.ERROR,
                        error=MalformedStream(f"chunk does not parse: {exc}"),
                    )
                    return
                for event in self._chunk_events(chunk):
                    if isinstance(event, Finished):
                        finished = True
                    yield event
                    if finished:
                        return
        except requests.RequestException as exc:
            yield Finished(FinishReason.ERROR, error=ProviderUnavailable(f"stream broke: {exc}"))
            return
        finally:
            response.close()
        if not finished:
            yield Finished(
                FinishReason.ERROR,
                error=MalformedStream("stream ended without a finish_reason"),
            )

    def _chunk_events(self, chunk: dict[str, Any]) -> Iterator[LlmEvent]:
        choices = chunk.get("choices") or []
        if not choices:
            return
        choice = choices[0]
        delta = choice.get("delta") or {}
        content = delta.get("content")
        if content:
            yield TextDelta(content)
        for call in delta.get("tool_calls") or []:
            function = call.get("function") or {}
            yield ToolCallDelta(
                index=int(call.get("index", 0)),
                id=call.get("id"),
                name=function.get("name"),
                arguments_fragment=function.get("arguments") or "",
            )
        reason = choice.get("finish_reason")
        if reason:
            mapped = _FINISH_REASONS.get(reason)
            if mapped is None:
                yield Finished(
                    FinishReason.ERROR,
                    error=MalformedStream(f"unknown finish_reason {reason!r}"),
                )
            else:
                yield Finished(mapped)
