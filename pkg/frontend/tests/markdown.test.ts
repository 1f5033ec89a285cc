import { describe, expect, it } from "vitest";

import { firstList, firstTable, parseBlocks } from "../src/markdown.js";

describe("parseBlocks", () => {
  it("joins wrapped lines into one paragraph", () => {
    const blocks = parseBlocks("first line\nsecond line\n\nnext para");
    expect(blocks).toEqual([
      { kind: "paragraph", text: "first line second line" },
      { kind: "paragraph", text: "next para" },
    ]);
  });

  it("parses a pipe table with header separator", () => {
    const blocks = parseBlocks(
      "| metric | SVM |\n|---|---|\n| accuracy | 0.752 |\n| recall | 0.773 |",
    );
    expect(blocks).toEqual([
      {
        kind: "table",
        header: ["metric", "SVM"],
        rows: [
          ["accuracy", "0.752"],
          ["recall", "0.773"],
        ],
      },
    ]);
  });

  it("accepts aligned separator syntax", () => {
    const table = firstTable(parseBlocks("| a | b |\n| :--- | ---: |\n| 1 | 2 |"));
    expect(table!.rows).toEqual([["1", "2"]]);
  });

  it("treats a pipe line without a separator as a paragraph", () => {
    const blocks = parseBlocks("| not | a table |");
    expect(blocks[0]!.kind).toBe("paragraph");
  });

  it("parses ordered lists and keeps item markdown", () => {
    const blocks = parseBlocks("1. **first** item\n2. second item");
    expect(blocks).toEqual([
      { kind: "list", ordered: true, items: ["**first** item", "second item"] },
    ]);
  });

  it("parses unordered lists", () => {
    const list = firstList(parseBlocks("- alpha\n- beta\n- gamma"));
    expect(list!.ordered).toBe(false);
    expect(list!.items).toEqual(["alpha", "beta", "gamma"]);
  });

  it("folds continuation lines into the previous list item", () => {
    const list = firstList(parseBlocks("1. first item\n   continues here\n2. second"));
    expect(list!.items).toEqual(["first item continues here", "second"]);
  });

  it("parses standalone images", () => {
    const blocks = parseBlocks("![roc curve](/api/artifacts/abc123)");
    expect(blocks).toEqual([
      { kind: "image", alt: "roc curve", src: "/api/artifacts/abc123" },
    ]);
  });

  it("parses headings", () => {
    expect(parseBlocks("## Results")).toEqual([
      { kind: "heading", level: 2, text: "Results" },
    ]);
  });

  it("handles the full listing answer shape", () => {
    const text =
      "There are 2 pipelines:\n\n1. **a-pipeline** - first.\n2. **b-pipeline** - second.\n\nMore exist elsewhere.";
    const blocks = parseBlocks(text);
    expect(blocks.map((b) => b.kind)).toEqual(["paragraph", "list", "paragraph"]);
    expect(firstList(blocks)!.items).toHaveLength(2);
  });

  it("returns no blocks for blank input", () => {
    expect(parseBlocks("")).toEqual([]);
    expect(parseBlocks("\n\n  \n")).toEqual([]);
  });
});
