import { parseBlocks } from "./markdown.js";
import type {
  GatewayEvent,
  ToolContent,
  TraceEntry,
  TurnView,
} from "./types.js";

// The view is a fold over the event log and nothing else: no clocks, no
// randomness, no ambient state. Replaying a recorded log therefore
// reproduces the identical view, which is also how the tests pin the
// rendered scenarios.

export function emptyTurn(userText: string): TurnView {
  return {
    userText,
    streamText: "",
    trace: [],
    final: null,
    error: null,
    status: "streaming",
  };
}

function describeResult(content: ToolContent): {
  status: "ok" | "error";
  errorType: string | null;
  detail: string;
} {
  const detail = JSON.stringify(content, null, 2);
  if (content.status === "error" && "error_type" in content) {
    return { status: "error", errorType: content.error_type, detail };
  }
  return { status: "ok", errorType: null, detail };
}

function resolveTrace(
  trace: TraceEntry[],
  callId: string,
  content: ToolContent,
  at: number | undefined,
): TraceEntry[] {
  return trace.map((entry) => {
    if (entry.callId !== callId || entry.status !== "pending") return entry;
    const { status, errorType, detail } = describeResult(content);
    const durationMs =
      at !== undefined && entry.calledAt !== null ? at - entry.calledAt : null;
    return { ...entry, status, errorType, detail, durationMs };
  });
}

export function applyEvent(view: TurnView, event: GatewayEvent): TurnView {
  // A turn has exactly one final or error state; anything after is noise
  // from a misbehaving stream and is dropped.
  if (view.status !== "streaming" && (event.kind === "final" || event.kind === "error")) {
    return view;
  }

  switch (event.kind) {
    case "token":
      return { ...view, streamText: view.streamText + event.data.text };

    case "tool_call": {
      const entry: TraceEntry = {
        callId: event.data.call_id,
        name: event.data.name,
        argumentsText: JSON.stringify(event.data.arguments),
        status: "pending",
        errorType: null,
        detail: "",
        durationMs: null,
        calledAt: event.at ?? null,
      };
      return { ...view, trace: [...view.trace, entry] };
    }

    case "tool_result":
      return {
        ...view,
        trace: resolveTrace(view.trace, event.data.call_id, event.data.content, event.at),
      };

    case "final":
      return {
        ...view,
        status: "done",
        final: {
          text: event.data.text,
          iterations: event.data.iterations,
          truncated: event.data.truncated === true,
          blocks: parseBlocks(event.data.text),
        },
      };

    case "error":
      return {
        ...view,
        status: "failed",
        error: {
          message: event.data.message,
          errorKind: event.data.error_kind ?? "",
        },
      };
  }
}

export function replayTurn(userText: string, events: GatewayEvent[]): TurnView {
  return events.reduce(applyEvent, emptyTurn(userText));
}

export function pendingCalls(view: TurnView): TraceEntry[] {
  return view.trace.filter((entry) => entry.status === "pending");
}
