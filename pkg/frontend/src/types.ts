// Wire types mirror the gateway's JSON exactly; view types are what the
// renderer consumes. Everything here is plain data so the view model can
// stay a pure function of the event log.

export type ToolOkContent = {
  status: "ok";
  result: Record<string, unknown>;
};

export type ToolErrorContent = {
  status: "error";
  error_type: string;
  message: string;
  retryable: boolean;
  details?: Record<string, unknown>;
};

export type ToolTruncatedContent = {
  status: string;
  truncated: true;
  content_text: string;
};

export type ToolContent = ToolOkContent | ToolErrorContent | ToolTruncatedContent;

export type TokenData = { text: string };

export type ToolCallData = {
  call_id: string;
  name: string;
  arguments: Record<string, unknown>;
};

export type ToolResultData = {
  call_id: string;
  name: string;
  content: ToolContent;
};

export type FinalData = {
  text: string;
  iterations: number;
  truncated?: boolean;
};

export type ErrorData = {
  message: string;
  error_kind?: string;
};

// One SSE frame, plus the arrival offset in milliseconds that the stream
// layer stamps on receipt. Recorded event logs carry the original
// offsets, which is what keeps replay deterministic.
export type GatewayEvent =
  | { kind: "token"; data: TokenData; at?: number }
  | { kind: "tool_call"; data: ToolCallData; at?: number }
  | { kind: "tool_result"; data: ToolResultData; at?: number }
  | { kind: "final"; data: FinalData; at?: number }
  | { kind: "error"; data: ErrorData; at?: number };

export type SessionInfo = {
  session_id: string;
  first_user_excerpt: string;
  updated_at: string;
};

export type HistoryToolCall = {
  id: string;
  name: string;
  arguments: Record<string, unknown>;
};

export type HistoryMessage = {
  role: "system" | "user" | "assistant" | "tool";
  content: string;
  created_at: string;
  tool_calls?: HistoryToolCall[];
  tool_call_id?: string;
};

// ---- view model ------------------------------------------------------

export type TraceStatus = "pending" | "ok" | "error";

export type TraceEntry = {
  callId: string;
  name: string;
  argumentsText: string;
  status: TraceStatus;
  errorType: string | null;
  detail: string;
  durationMs: number | null;
  calledAt: number | null;
};

export type Block =
  | { kind: "paragraph"; text: string }
  | { kind: "heading"; level: number; text: string }
  | { kind: "list"; ordered: boolean; items: string[] }
  | { kind: "table"; header: string[]; rows: string[][] }
  | { kind: "image"; alt: string; src: string };

export type FinalView = {
  text: string;
  iterations: number;
  truncated: boolean;
  blocks: Block[];
};

export type ErrorView = {
  message: string;
  errorKind: string;
};

export type TurnStatus = "streaming" | "done" | "failed";

export type TurnView = {
  userText: string;
  streamText: string;
  trace: TraceEntry[];
  final: FinalView | null;
  error: ErrorView | null;
  status: TurnStatus;
};
