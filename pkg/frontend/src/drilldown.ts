import type { SankeyDocument } from "./types.js";

export interface Drilldown {
  nodeId: string;
  /** Player counts arriving from each previous-bin cluster label. */
  inflow: Record<string, number>;
  /** Player counts leaving toward each next-bin cluster label. */
  outflow: Record<string, number>;
  joining: number;
  departing: number;
  /** True when the node has no incoming ribbons at all. */
  allJoining: boolean;
  /** Ids of the links incident to the node, for highlighting. */
  linkIndices: number[];
}

/** Summarize where a node's players came from and went, using links only. */
export function drilldown(doc: SankeyDocument, nodeId: string): Drilldown {
  const node = doc.nodes.find((n) => n.id === nodeId);
  if (!node) throw new Error(`unknown node '${nodeId}'`);
  const byId = new Map(doc.nodes.map((n) => [n.id, n]));
  const inflow: Record<string, number> = {};
  const outflow: Record<string, number> = {};
  const linkIndices: number[] = [];
  doc.links.forEach((l, i) => {
    if (l.target === nodeId) {
      const label = byId.get(l.source)!.cluster;
      inflow[label] = (inflow[label] ?? 0) + l.value;
      linkIndices.push(i);
    } else if (l.source === nodeId) {
      const label = byId.get(l.target)!.cluster;
      outflow[label] = (outflow[label] ?? 0) + l.value;
      linkIndices.push(i);
    }
  });
  return {
    nodeId,
    inflow,
    outflow,
    joining: node.joining,
    departing: node.departing,
    allJoining: Object.keys(inflow).length === 0,
    linkIndices,
  };
}

/** Render a drilldown as display lines for the side panel. */
export function drilldownLines(d: Drilldown): string[] {
  const lines: string[] = [];
  if (d.allJoining) {
    lines.push("Inflow: all players newly joining");
  } else {
    lines.push("Inflow:");
    for (const [label, v] of Object.entries(d.inflow)) {
      lines.push(`  from ${label}: ${v}`);
    }
    if (d.joining > 0) lines.push(`  newly joining: ${d.joining}`);
  }
  lines.push("Outflow:");
  for (const [label, v] of Object.entries(d.outflow)) {
    lines.push(`  to ${label}: ${v}`);
  }
  if (d.departing > 0) lines.push(`  departing: ${d.departing}`);
  return lines;
}
