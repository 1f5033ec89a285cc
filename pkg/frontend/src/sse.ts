import type { GatewayEvent } from "./types.js";

export type SseFrame = { event: string; data: string };

// Incremental SSE frame splitter. Frames are separated by a blank line;
// a frame may arrive across any number of chunks.
export class SseFrameParser {
  private buffer = "";

  push(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    let boundary: number;
    while ((boundary = this.buffer.search(/\r?\n\r?\n/)) !== -1) {
      const raw = this.buffer.slice(0, boundary);
      this.buffer = this.buffer.slice(boundary).replace(/^\r?\n\r?\n/, "");
      const frame = parseFrame(raw);
      if (frame) frames.push(frame);
    }
    return frames;
  }
}

function parseFrame(raw: string): SseFrame | null {
  let event = "message";
  const dataLines: string[] = [];
  for (const line of raw.split(/\r?\n/)) {
    if (line.startsWith("event:")) {
      event = line.slice("event:".length).trim();
    } else if (line.startsWith("data:")) {
      dataLines.push(line.slice("data:".length).trimStart());
    }
  }
  if (dataLines.length === 0) return null;
  return { event, data: dataLines.join("\n") };
}

const KNOWN_KINDS = new Set(["token", "tool_call", "tool_result", "final", "error"]);

export function toGatewayEvent(frame: SseFrame, at: number): GatewayEvent | null {
  if (!KNOWN_KINDS.has(frame.event)) return null;
  let data: unknown;
  try {
    data = JSON.parse(frame.data);
  } catch {
    return null;
  }
  return { kind: frame.event, data, at } as GatewayEvent;
}

// Reads a streaming response body and hands each gateway event to the
// callback, stamped with its arrival offset in milliseconds.
export async function consumeEventStream(
  body: ReadableStream<Uint8Array>,
  onEvent: (event: GatewayEvent) => void,
  now: () => number = () => performance.now(),
): Promise<void> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  const parser = new SseFrameParser();
  const started = now();
  for (;;) {
    const { value, done } = await reader.read();
    if (done) break;
    for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
      const event = toGatewayEvent(frame, now() - started);
      if (event) onEvent(event);
    }
  }
}
