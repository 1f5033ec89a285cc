import { GatewayClient, GatewayError } from "./api.js";
import { renderTurn } from "./render.js";
import { applyEvent, emptyTurn } from "./viewModel.js";
import type { HistoryMessage, SessionInfo, TurnView } from "./types.js";
import { parseBlocks } from "./markdown.js";

// Browser entry point: session sidebar on the left, one conversation
// pane, token entry in the header. All visual state lives in `turns`
// and is re-rendered wholesale; at chat scale that is plenty fast.

const $ = <T extends HTMLElement>(selector: string): T => {
  const el = document.querySelector<T>(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el;
};

let client: GatewayClient | null = null;
let activeSession: string | null = null;
let turns: TurnView[] = [];
let sending = false;

function artifactUrl(handle: string): string {
  return client ? client.artifactUrl(handle) : handle;
}

function redraw(): void {
  const pane = $("#conversation");
  pane.innerHTML = turns.map((turn) => renderTurn(turn, artifactUrl)).join("");
  pane.scrollTop = pane.scrollHeight;
}

function setStatus(text: string, isError = false): void {
  const status = $("#status");
  status.textContent = text;
  status.className = isError ? "status error" : "status";
}

// History messages replay into finished turns: each user message opens a
// turn, assistant tool calls become resolved trace rows, the closing
// assistant message becomes the final view.
function turnsFromHistory(messages: HistoryMessage[]): TurnView[] {
  const result: TurnView[] = [];
  let current: TurnView | null = null;
  for (const message of messages) {
    if (message.role === "user") {
      current = emptyTurn(message.content);
      result.push(current);
      continue;
    }
    if (!current) continue;
    let turn: TurnView = current;
    if (message.role === "assistant" && (message.tool_calls?.length ?? 0) > 0) {
      for (const call of message.tool_calls!) {
        turn = applyEvent(turn, {
          kind: "tool_call",
          data: { call_id: call.id, name: call.name, arguments: call.arguments },
        });
      }
    } else if (message.role === "tool") {
      let content: unknown;
      try {
        content = JSON.parse(message.content);
      } catch {
        content = { status: "ok", result: { text: message.content } };
      }
      turn = applyEvent(turn, {
        kind: "tool_result",
        data: {
          call_id: message.tool_call_id ?? "",
          name: "",
          content: content as never,
        },
      });
    } else if (message.role === "assistant") {
      turn = {
        ...turn,
        status: "done",
        final: {
          text: message.content,
          iterations: 0,
          truncated: false,
          blocks: parseBlocks(message.content),
        },
      };
    }
    current = turn;
    result[result.length - 1] = turn;
  }
  return result;
}

async function refreshSessions(): Promise<void> {
  if (!client) return;
  let sessions: SessionInfo[];
  try {
    sessions = await client.listSessions();
  } catch (err) {
    setStatus(err instanceof Error ? err.message : String(err), true);
    return;
  }
  const list = $("#sessions");
  list.innerHTML = "";
  for (const session of sessions) {
    const item = document.createElement("li");
    item.textContent = session.first_user_excerpt || "(new conversation)";
    item.className = session.session_id === activeSession ? "active" : "";
    item.onclick = () => void openSession(session.session_id);
    list.appendChild(item);
  }
}

async function openSession(sessionId: string): Promise<void> {
  if (!client) return;
  activeSession = sessionId;
  try {
    turns = turnsFromHistory(await client.fetchHistory(sessionId));
  } catch (err) {
    setStatus(err instanceof Error ? err.message : String(err), true);
    return;
  }
  setStatus("");
  redraw();
  void refreshSessions();
}

async function send(): Promise<void> {
  if (!client || sending) return;
  const input = $<HTMLTextAreaElement>("#composer");
  const text = input.value.trim();
  if (!text) return;

  if (!activeSession) {
    const created = await client.createSession();
    activeSession = created.session_id;
  }

  sending = true;
  input.value = "";
  let turn = emptyTurn(text);
  turns.push(turn);
  redraw();

  try {
    await client.sendMessage(activeSession, text, (event) => {
      turn = applyEvent(turn, event);
      turns[turns.length - 1] = turn;
      redraw();
    });
    setStatus("");
  } catch (err) {
    if (err instanceof GatewayError && err.busy) {
      setStatus("assistant is busy - try again in a moment", true);
      turns.pop(); // turn never started server-side
    } else {
      // Likely a dropped connection; the server finishes the turn on its
      // own, so re-fetch the authoritative history.
      setStatus(err instanceof Error ? err.message : String(err), true);
      if (activeSession) await openSession(activeSession);
    }
  } finally {
    sending = false;
    redraw();
    void refreshSessions();
  }
}

function connect(): void {
  const base = $<HTMLInputElement>("#base-url").value.trim().replace(/\/$/, "");
  const token = $<HTMLInputElement>("#token").value.trim();
  if (!token) {
    setStatus("enter an access token", true);
    return;
  }
  localStorage.setItem("swarm.baseUrl", base);
  localStorage.setItem("swarm.token", token);
  client = new GatewayClient(base, token);
  activeSession = null;
  turns = [];
  redraw();
  setStatus("connected");
  void refreshSessions();
}

export function start(): void {
  $<HTMLInputElement>("#base-url").value = localStorage.getItem("swarm.baseUrl") ?? "";
  $<HTMLInputElement>("#token").value = localStorage.getItem("swarm.token") ?? "";
  $("#connect").onclick = connect;
  $("#new-session").onclick = () => {
    activeSession = null;
    turns = [];
    redraw();
  };
  $("#send").onclick = () => void send();
  $<HTMLTextAreaElement>("#composer").addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      void send();
    }
  });
  if (localStorage.getItem("swarm.token")) connect();
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
