import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { renderSvg } from "../src/render.js";
import { linkTooltip, nodeTooltip } from "../src/tooltip.js";
import { validateDocument } from "../src/validate.js";

const load = (name: string) =>
  validateDocument(JSON.parse(readFileSync(new URL(`../testdata/${name}`, import.meta.url), "utf8")));

describe("renderSvg", () => {
  it("emits one addressable rect per node and one path per link", () => {
    const doc = load("demo.sankey.json");
    const { svg } = renderSvg(doc);
    for (const n of doc.nodes) {
      expect(svg).toContain(`data-node-id="${n.id}"`);
    }
    expect(svg.match(/data-link-index=/g)).toHaveLength(doc.links.length);
  });

  it("shows bin labels, totals, and retention in the chrome", () => {
    const doc = load("toy.sankey.json");
    const { svg } = renderSvg(doc, 800, 400);
    expect(svg).toContain("2012-01");
    expect(svg).toContain("3 players");
    expect(svg).toContain("retention 66.7%");
  });

  it("fills node rectangles with the document colors", () => {
    const doc = load("toy.sankey.json");
    const { svg } = renderSvg(doc, 800, 400);
    expect(svg).toContain('fill="#006d2c"');
    expect(svg).toContain('fill="#8c2d04"');
  });
});

describe("tooltips", () => {
  it("describes a node with label, description, and counts", () => {
    const doc = load("toy.sankey.json");
    const lines = nodeTooltip(doc, doc.nodes[0]);
    expect(lines[0]).toBe("Casual — 2012-01");
    expect(lines).toContain("Low activity, middling success.");
    expect(lines).toContain("Players: 3");
    expect(lines).toContain("Joining: 3");
    expect(lines).toContain("Departing: 1");
  });

  it("describes a link with endpoints and value", () => {
    const doc = load("toy.sankey.json");
    const lines = linkTooltip(doc, doc.links[0]);
    expect(lines[0]).toBe("Casual → Hardcore");
    expect(lines[1]).toBe("2012-01 → 2012-02");
    expect(lines[2]).toBe("Players: 1");
  });
});
