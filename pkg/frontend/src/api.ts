import { consumeEventStream } from "./sse.js";
import type { GatewayEvent, HistoryMessage, SessionInfo } from "./types.js";

export class GatewayError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }

  get busy(): boolean {
    return this.status === 409;
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new GatewayError(response.status, detail);
}

export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {
      Authorization: `Bearer ${this.token}`,
    };
    if (json) headers["Content-Type"] = "application/json";
    return headers;
  }

  async createSession(): Promise<SessionInfo & { session_id: string }> {
    const response = await this.fetchFn(`${this.baseUrl}/api/sessions`, {
      method: "POST",
      headers: this.headers(),
    });
    await raiseForStatus(response);
    return (await response.json()) as SessionInfo & { session_id: string };
  }

  async listSessions(): Promise<SessionInfo[]> {
    const response = await this.fetchFn(`${this.baseUrl}/api/sessions`, {
      headers: this.headers(),
    });
    await raiseForStatus(response);
    const body = (await response.json()) as { sessions: SessionInfo[] };
    return body.sessions;
  }

  async fetchHistory(sessionId: string): Promise<HistoryMessage[]> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}/history`,
      { headers: this.headers() },
    );
    await raiseForStatus(response);
    const body = (await response.json()) as { messages: HistoryMessage[] };
    return body.messages;
  }

  async sendMessage(
    sessionId: string,
    text: string,
    onEvent: (event: GatewayEvent) => void,
  ): Promise<void> {
    const response = await this.fetchFn(
      `${this.baseUrl}/api/sessions/${encodeURIComponent(sessionId)}/messages`,
      {
        method: "POST",
        headers: this.headers(true),
        body: JSON.stringify({ text }),
      },
    );
    await raiseForStatus(response);
    if (!response.body) throw new GatewayError(0, "response has no body");
    await consumeEventStream(response.body, onEvent);
  }

  artifactUrl(handle: string): string {
    // Handles already arrive as gateway-relative URLs; anything else is
    // treated as a bare handle token.
    if (handle.startsWith("/api/artifacts/")) return `${this.baseUrl}${handle}`;
    if (handle.startsWith("http")) return handle;
    return `${this.baseUrl}/api/artifacts/${encodeURIComponent(handle)}`;
  }
}
