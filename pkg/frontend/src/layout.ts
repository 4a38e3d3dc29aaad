import type { SankeyDocument, SankeyLink, SankeyNode } from "./types.js";

export interface NodeBox {
  node: SankeyNode;
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface RibbonPath {
  link: SankeyLink;
  linkIndex: number;
  /** Vertical extent on the source node's right edge. */
  sourceY0: number;
  sourceY1: number;
  /** Vertical extent on the target node's left edge. */
  targetY0: number;
  targetY1: number;
  x0: number; // right edge of source node
  x1: number; // left edge of target node
}

export interface Layout {
  width: number;
  height: number;
  plotTop: number;
  plotHeight: number;
  columnX: number[]; // left edge of each column's node rectangles
  nodeWidth: number;
  scale: number; // pixels per player
  boxes: NodeBox[];
  ribbons: RibbonPath[];
}

export const NODE_WIDTH = 18;
export const HEADER_HEIGHT = 48;
export const FOOTER_HEIGHT = 36;

/**
 * Columnar layout: each bin is a column of stacked rectangles anchored at the
 * bottom of the plot area with no padding between them, in document node
 * order.  A single vertical scale is shared by all columns so equal player
 * counts render at equal heights everywhere.
 */
export function computeLayout(doc: SankeyDocument, width: number, height: number): Layout {
  const nBins = doc.meta.bin_labels.length;
  const plotTop = HEADER_HEIGHT;
  const plotHeight = Math.max(1, height - HEADER_HEIGHT - FOOTER_HEIGHT);

  const columnTotal = new Array<number>(nBins).fill(0);
  for (const n of doc.nodes) columnTotal[n.month] += n.value;
  const maxTotal = Math.max(1, ...columnTotal);
  const scale = plotHeight / maxTotal;

  const gap = nBins > 1 ? (width - nBins * NODE_WIDTH) / (nBins - 1) : 0;
  const columnX = Array.from({ length: nBins }, (_, t) =>
    nBins > 1 ? t * (NODE_WIDTH + gap) : (width - NODE_WIDTH) / 2);

  const boxes: NodeBox[] = [];
  const boxById = new Map<string, NodeBox>();
  const cursor = new Array<number>(nBins).fill(0); // players stacked so far, from the bottom
  for (const node of doc.nodes) {
    const t = node.month;
    const h = node.value * scale;
    const y = plotTop + plotHeight - (cursor[t] + node.value) * scale;
    const box: NodeBox = { node, x: columnX[t], y, width: NODE_WIDTH, height: h };
    boxes.push(box);
    boxById.set(node.id, box);
    cursor[t] += node.value;
  }

  // Ribbons attach top-down along each node edge in document link order.
  const outOffset = new Map<string, number>();
  const inOffset = new Map<string, number>();
  const ribbons: RibbonPath[] = doc.links.map((link, linkIndex) => {
    const s = boxById.get(link.source)!;
    const t = boxById.get(link.target)!;
    const so = outOffset.get(link.source) ?? 0;
    const ti = inOffset.get(link.target) ?? 0;
    const h = link.value * scale;
    outOffset.set(link.source, so + h);
    inOffset.set(link.target, ti + h);
    return {
      link,
      linkIndex,
      sourceY0: s.y + so,
      sourceY1: s.y + so + h,
      targetY0: t.y + ti,
      targetY1: t.y + ti + h,
      x0: s.x + s.width,
      x1: t.x,
    };
  });

  return { width, height, plotTop, plotHeight, columnX, nodeWidth: NODE_WIDTH, scale, boxes, ribbons };
}
