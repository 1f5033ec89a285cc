import type { Block, TraceEntry, TurnView } from "./types.js";

// Pure HTML-string rendering so the view layer stays testable without a
// DOM; main.ts owns element wiring and event handlers.

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// Bold and inline code only; everything else renders literally.
export function renderInline(text: string): string {
  return escapeHtml(text)
    .replace(/\*\*([^*]+)\*\*/g, "<strong>$1</strong>")
    .replace(/`([^`]+)`/g, "<code>$1</code>");
}

export function renderBlock(block: Block, artifactUrl: (handle: string) => string): string {
  switch (block.kind) {
    case "paragraph":
      return `<p>${renderInline(block.text)}</p>`;
    case "heading": {
      const level = Math.min(block.level + 2, 6); // h1/h2 are page chrome
      return `<h${level}>${renderInline(block.text)}</h${level}>`;
    }
    case "list": {
      const tag = block.ordered ? "ol" : "ul";
      const items = block.items.map((item) => `<li>${renderInline(item)}</li>`).join("");
      return `<${tag}>${items}</${tag}>`;
    }
    case "table": {
      const head = block.header.map((cell) => `<th>${renderInline(cell)}</th>`).join("");
      const rows = block.rows
        .map((row) => `<tr>${row.map((cell) => `<td>${renderInline(cell)}</td>`).join("")}</tr>`)
        .join("");
      return `<table class="md-table"><thead><tr>${head}</tr></thead><tbody>${rows}</tbody></table>`;
    }
    case "image":
      return (
        `<img class="artifact" src="${escapeHtml(artifactUrl(block.src))}" ` +
        `alt="${escapeHtml(block.alt)}" ` +
        `onerror="this.outerHTML='<div class=&quot;artifact-missing&quot;>artifact unavailable</div>'">`
      );
  }
}

function renderTraceEntry(entry: TraceEntry): string {
  const badge =
    entry.status === "pending"
      ? `<span class="badge pending">running</span>`
      : entry.status === "ok"
        ? `<span class="badge ok">ok</span>`
        : `<span class="badge error">${escapeHtml(entry.errorType ?? "error")}</span>`;
  const duration =
    entry.durationMs !== null
      ? `<span class="duration">${entry.durationMs.toFixed(0)} ms</span>`
      : "";
  const detail = entry.detail
    ? `<pre class="trace-detail">${escapeHtml(entry.detail)}</pre>`
    : "";
  return (
    `<details class="trace-entry">` +
    `<summary><code>${escapeHtml(entry.name)}</code> ${badge} ${duration}</summary>` +
    `<pre class="trace-args">${escapeHtml(entry.argumentsText)}</pre>${detail}` +
    `</details>`
  );
}

export function renderTurn(view: TurnView, artifactUrl: (handle: string) => string): string {
  const parts: string[] = [];
  parts.push(`<div class="msg user">${renderInline(view.userText)}</div>`);
  if (view.trace.length > 0) {
    parts.push(`<div class="trace">${view.trace.map(renderTraceEntry).join("")}</div>`);
  }
  if (view.status === "streaming") {
    parts.push(`<div class="msg assistant streaming">${renderInline(view.streamText)}</div>`);
  } else if (view.final) {
    const body = view.final.blocks.map((b) => renderBlock(b, artifactUrl)).join("");
    const truncated = view.final.truncated
      ? `<div class="chip warn">response truncated at the tool-call limit</div>`
      : "";
    parts.push(`<div class="msg assistant">${body}${truncated}</div>`);
  } else if (view.error) {
    const kind = view.error.errorKind ? ` (${escapeHtml(view.error.errorKind)})` : "";
    parts.push(
      `<div class="chip error">error${kind}: ${escapeHtml(view.error.message)}</div>`,
    );
  }
  return `<div class="turn">${parts.join("")}</div>`;
}
