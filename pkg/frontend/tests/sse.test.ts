import { describe, expect, it } from "vitest";

import { consumeEventStream, SseFrameParser, toGatewayEvent } from "../src/sse.js";
import type { GatewayEvent } from "../src/types.js";

describe("SseFrameParser", () => {
  it("splits complete frames", () => {
    const parser = new SseFrameParser();
    const frames = parser.push('event: token\ndata: {"text": "hi"}\n\n');
    expect(frames).toEqual([{ event: "token", data: '{"text": "hi"}' }]);
  });

  it("holds partial frames until the boundary arrives", () => {
    const parser = new SseFrameParser();
    expect(parser.push("event: token\ndata: {")).toEqual([]);
    expect(parser.push('"text": "hi"}')).toEqual([]);
    const frames = parser.push("\n\nevent: final\ndata: {}\n\n");
    expect(frames.map((f) => f.event)).toEqual(["token", "final"]);
  });

  it("handles CRLF line endings", () => {
    const parser = new SseFrameParser();
    const frames = parser.push("event: final\r\ndata: {}\r\n\r\n");
    expect(frames).toEqual([{ event: "final", data: "{}" }]);
  });

  it("joins multi-line data fields", () => {
    const parser = new SseFrameParser();
    const frames = parser.push("data: one\ndata: two\n\n");
    expect(frames).toEqual([{ event: "message", data: "one\ntwo" }]);
  });

  it("drops frames without data", () => {
    const parser = new SseFrameParser();
    expect(parser.push(": keepalive comment\n\n")).toEqual([]);
  });
});

describe("toGatewayEvent", () => {
  it("parses known kinds and stamps the offset", () => {
    const event = toGatewayEvent({ event: "token", data: '{"text": "x"}' }, 12.5);
    expect(event).toEqual({ kind: "token", data: { text: "x" }, at: 12.5 });
  });

  it("rejects unknown kinds and malformed JSON", () => {
    expect(toGatewayEvent({ event: "ping", data: "{}" }, 0)).toBeNull();
    expect(toGatewayEvent({ event: "token", data: "{nope" }, 0)).toBeNull();
  });
});

describe("consumeEventStream", () => {
  function bodyFromChunks(chunks: string[]): ReadableStream<Uint8Array> {
    const encoder = new TextEncoder();
    return new ReadableStream({
      start(controller) {
        for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
        controller.close();
      },
    });
  }

  it("emits events with monotonic arrival offsets", async () => {
    const chunks = [
      'event: tool_call\ndata: {"call_id": "c1", "name": "t", "arguments": {}}\n\n',
      'event: tool_result\ndata: {"call_id": "c1", "name": "t", ',
      '"content": {"status": "ok", "result": {}}}\n\nevent: final\ndata: {"text": "done", "iterations": 1}\n\n',
    ];
    const seen: GatewayEvent[] = [];
    let clock = 0;
    await consumeEventStream(bodyFromChunks(chunks), (e) => seen.push(e), () => (clock += 5));
    expect(seen.map((e) => e.kind)).toEqual(["tool_call", "tool_result", "final"]);
    const offsets = seen.map((e) => e.at!);
    expect([...offsets].sort((a, b) => a - b)).toEqual(offsets);
    expect(offsets[0]!).toBeGreaterThanOrEqual(0);
  });

  it("splits multibyte characters across chunk boundaries safely", async () => {
    const frame = 'event: token\ndata: {"text": "héllo"}\n\n';
    const bytes = new TextEncoder().encode(frame);
    const body = new ReadableStream<Uint8Array>({
      start(controller) {
        // cut inside the two-byte é sequence
        const cut = frame.indexOf("é") + 1;
        controller.enqueue(bytes.slice(0, cut));
        controller.enqueue(bytes.slice(cut));
        controller.close();
      },
    });
    const seen: GatewayEvent[] = [];
    await consumeEventStream(body, (e) => seen.push(e));
    expect(seen).toHaveLength(1);
    expect((seen[0]!.data as { text: string }).text).toBe("héllo");
  });
});
