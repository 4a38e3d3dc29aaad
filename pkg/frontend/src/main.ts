import type { SankeyDocument, SankeyLink, SankeyNode } from "./types.js";
import { DocumentError, validateDocument } from "./validate.js";
import { renderSvg } from "./render.js";
import { drilldown, drilldownLines } from "./drilldown.js";
import { linkTooltip, nodeTooltip } from "./tooltip.js";

const chart = document.getElementById("chart") as HTMLElement;
const errorPanel = document.getElementById("errors") as HTMLElement;
const sidePanel = document.getElementById("panel") as HTMLElement;
const tooltipEl = document.getElementById("tooltip") as HTMLElement;
const filePicker = document.getElementById("file") as HTMLInputElement;

let currentDoc: SankeyDocument | null = null;
let selectedNode: string | null = null;

function showErrors(problems: string[]): void {
  chart.innerHTML = "";
  sidePanel.textContent = "";
  errorPanel.style.display = "block";
  errorPanel.innerHTML =
    "<h2>Document rejected</h2><ul>" +
    problems.map((p) => `<li>${p.replace(/</g, "&lt;")}</li>`).join("") +
    "</ul>";
}

function showTooltip(lines: string[], x: number, y: number): void {
  tooltipEl.style.display = "block";
  tooltipEl.style.left = `${x + 12}px`;
  tooltipEl.style.top = `${y + 12}px`;
  tooltipEl.textContent = lines.join("\n");
}

function hideTooltip(): void {
  tooltipEl.style.display = "none";
}

function applyHighlight(): void {
  if (!currentDoc) return;
  const active = selectedNode === null ? null : drilldown(currentDoc, selectedNode);
  const keep = active === null ? null : new Set(active.linkIndices);
  chart.querySelectorAll<SVGPathElement>("path.ribbon").forEach((p) => {
    const i = Number(p.dataset.linkIndex);
    p.setAttribute("fill-opacity", keep === null || keep.has(i) ? "0.35" : "0.06");
  });
  chart.querySelectorAll<SVGRectElement>("rect.node").forEach((r) => {
    const id = r.dataset.nodeId!;
    const dim = active !== null && id !== selectedNode &&
      !currentDoc!.links.some((l, i) => keep!.has(i) && (l.source === id || l.target === id));
    r.setAttribute("opacity", dim ? "0.25" : "1");
  });
  if (active === null) {
    sidePanel.textContent = "Click a cluster to see where its players came from and went.";
  } else {
    const node = currentDoc.nodes.find((n) => n.id === selectedNode)!;
    sidePanel.textContent =
      [`${node.cluster} — ${currentDoc.meta.bin_labels[node.month]}`, ""]
        .concat(drilldownLines(active)).join("\n");
  }
}

function wireInteractions(doc: SankeyDocument): void {
  const nodeById = new Map<string, SankeyNode>(doc.nodes.map((n) => [n.id, n]));
  chart.querySelectorAll<SVGRectElement>("rect.node").forEach((r) => {
    const node = nodeById.get(r.dataset.nodeId!)!;
    r.addEventListener("mousemove", (e) =>
      showTooltip(nodeTooltip(doc, node), e.pageX, e.pageY));
    r.addEventListener("mouseleave", hideTooltip);
    r.addEventListener("click", () => {
      selectedNode = selectedNode === node.id ? null : node.id;
      applyHighlight();
    });
  });
  chart.querySelectorAll<SVGPathElement>("path.ribbon").forEach((p) => {
    const link: SankeyLink = doc.links[Number(p.dataset.linkIndex)];
    p.addEventListener("mousemove", (e) =>
      showTooltip(linkTooltip(doc, link), e.pageX, e.pageY));
    p.addEventListener("mouseleave", hideTooltip);
  });
  document.addEventListener("keydown", (e) => {
    if (e.key === "Escape" && selectedNode !== null) {
      selectedNode = null;
      applyHighlight();
    }
  });
}

function load(raw: unknown): void {
  errorPanel.style.display = "none";
  let doc: SankeyDocument;
  try {
    doc = validateDocument(raw);
  } catch (err) {
    showErrors(err instanceof DocumentError ? err.problems : [String(err)]);
    return;
  }
  currentDoc = doc;
  selectedNode = null;
  const { svg } = renderSvg(doc, chart.clientWidth || 1200, 640);
  chart.innerHTML = svg;
  wireInteractions(doc);
  applyHighlight();
}

filePicker.addEventListener("change", async () => {
  const file = filePicker.files?.[0];
  if (!file) return;
  try {
    load(JSON.parse(await file.text()));
  } catch (err) {
    showErrors([`not valid JSON: ${String(err)}`]);
  }
});

const param = new URLSearchParams(window.location.search).get("doc");
if (param) {
  fetch(param)
    .then((r) => {
      if (!r.ok) throw new Error(`HTTP ${r.status}`);
      return r.json();
    })
    .then(load)
    .catch((err) => showErrors([`could not fetch '${param}': ${String(err)}`]));
}
