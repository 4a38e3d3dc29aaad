import type { SankeyDocument, SankeyLink, SankeyNode } from "./types.js";

/** Text for a node hover tooltip, one entry per line. */
export function nodeTooltip(doc: SankeyDocument, node: SankeyNode): string[] {
  const binLabel = doc.meta.bin_labels[node.month] ?? String(node.month);
  return [
    `${node.cluster} — ${binLabel}`,
    node.description,
    `Players: ${node.value}`,
    `Joining: ${node.joining}`,
    `Departing: ${node.departing}`,
  ];
}

/** Text for a ribbon hover tooltip. */
export function linkTooltip(doc: SankeyDocument, link: SankeyLink): string[] {
  const byId = new Map(doc.nodes.map((n) => [n.id, n]));
  const s = byId.get(link.source)!;
  const t = byId.get(link.target)!;
  return [
    `${s.cluster} → ${t.cluster}`,
    `${doc.meta.bin_labels[s.month]} → ${doc.meta.bin_labels[t.month]}`,
    `Players: ${link.value}`,
  ];
}
