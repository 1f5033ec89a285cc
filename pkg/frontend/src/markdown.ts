import type { Block } from "./types.js";

// Covers what the assistant actually emits: paragraphs, headings,
// ordered/unordered lists, pipe tables, and standalone images. Inline
// styling (bold, code) is left in the text for the renderer.

const TABLE_ROW = /^\s*\|(.+)\|\s*$/;
const TABLE_SEPARATOR = /^\s*\|?\s*:?-{3,}:?\s*(\|\s*:?-{3,}:?\s*)*\|?\s*$/;
const ORDERED_ITEM = /^\s*\d+[.)]\s+(.*)$/;
const UNORDERED_ITEM = /^\s*[-*]\s+(.*)$/;
const HEADING = /^(#{1,6})\s+(.*)$/;
const IMAGE_ONLY = /^!\[([^\]]*)\]\(([^)]+)\)$/;

function splitCells(line: string): string[] {
  const match = line.match(TABLE_ROW);
  const inner = match ? match[1]! : line;
  return inner.split("|").map((cell) => cell.trim());
}

function parseChunk(lines: string[]): Block[] {
  const first = lines[0]!;

  const heading = first.match(HEADING);
  if (heading && lines.length === 1) {
    return [{ kind: "heading", level: heading[1]!.length, text: heading[2]! }];
  }

  const image = first.trim().match(IMAGE_ONLY);
  if (image && lines.length === 1) {
    return [{ kind: "image", alt: image[1]!, src: image[2]! }];
  }

  if (TABLE_ROW.test(first) && lines.length >= 2 && TABLE_SEPARATOR.test(lines[1]!)) {
    const header = splitCells(first);
    const rows = lines
      .slice(2)
      .filter((line) => TABLE_ROW.test(line))
      .map(splitCells);
    return [{ kind: "table", header, rows }];
  }

  if (ORDERED_ITEM.test(first) || UNORDERED_ITEM.test(first)) {
    const ordered = ORDERED_ITEM.test(first);
    const pattern = ordered ? ORDERED_ITEM : UNORDERED_ITEM;
    const items: string[] = [];
    for (const line of lines) {
      const item = line.match(pattern);
      if (item) {
        items.push(item[1]!);
      } else if (items.length > 0) {
        // continuation line of the previous item
        items[items.length - 1] += " " + line.trim();
      }
    }
    return [{ kind: "list", ordered, items }];
  }

  return [{ kind: "paragraph", text: lines.map((l) => l.trim()).join(" ") }];
}

export function parseBlocks(text: string): Block[] {
  const blocks: Block[] = [];
  for (const chunk of text.split(/\n\s*\n/)) {
    const lines = chunk.split("\n").filter((line) => line.trim() !== "");
    if (lines.length === 0) continue;
    blocks.push(...parseChunk(lines));
  }
  return blocks;
}

export function firstTable(blocks: Block[]): Extract<Block, { kind: "table" }> | null {
  for (const block of blocks) {
    if (block.kind === "table") return block;
  }
  return null;
}

export function firstList(blocks: Block[]): Extract<Block, { kind: "list" }> | null {
  for (const block of blocks) {
    if (block.kind === "list") return block;
  }
  return null;
}
