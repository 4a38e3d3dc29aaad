import type { SankeyDocument } from "./types.js";
import { computeLayout, type Layout } from "./layout.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(x: number): string {
  return String(Math.round(x * 100) / 100);
}

function ribbonPath(x0: number, x1: number, sy0: number, sy1: number,
                    ty0: number, ty1: number): string {
  const cx = (x0 + x1) / 2;
  return `M ${fmt(x0)} ${fmt(sy0)} C ${fmt(cx)} ${fmt(sy0)}, ${fmt(cx)} ${fmt(ty0)}, ${fmt(x1)} ${fmt(ty0)} ` +
         `L ${fmt(x1)} ${fmt(ty1)} C ${fmt(cx)} ${fmt(ty1)}, ${fmt(cx)} ${fmt(sy1)}, ${fmt(x0)} ${fmt(sy1)} Z`;
}

export interface RenderResult {
  svg: string;
  layout: Layout;
}

/**
 * Render the document as an SVG markup string.  Every node rectangle carries
 * a data-node-id attribute and every ribbon a data-link-index attribute so
 * the interactive shell (and tests) can address them without re-deriving
 * geometry.
 */
export function renderSvg(doc: SankeyDocument, width = 1200, height = 640): RenderResult {
  const layout = computeLayout(doc, width, height);
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
             `width="${width}" height="${height}" font-family="sans-serif" font-size="12">`);

  // column headers: bin label, player total, retention from the previous bin
  const { meta } = doc;
  for (let t = 0; t < meta.bin_labels.length; t++) {
    const cx = layout.columnX[t] + layout.nodeWidth / 2;
    parts.push(`<text x="${fmt(cx)}" y="16" text-anchor="middle" font-weight="bold">` +
               `${esc(meta.bin_labels[t])}</text>`);
    parts.push(`<text x="${fmt(cx)}" y="32" text-anchor="middle" fill="#555">` +
               `${meta.total_players_per_bin[t] ?? 0} players</text>`);
    if (t > 0 && meta.retention_per_bin[t - 1] !== undefined) {
      const pct = (meta.retention_per_bin[t - 1] * 100).toFixed(1);
      parts.push(`<text x="${fmt(cx)}" y="${height - 12}" text-anchor="middle" fill="#555">` +
                 `retention ${pct}%</text>`);
    }
  }

  for (const r of layout.ribbons) {
    const d = ribbonPath(r.x0, r.x1, r.sourceY0, r.sourceY1, r.targetY0, r.targetY1);
    parts.push(`<path class="ribbon" data-link-index="${r.linkIndex}" d="${d}" ` +
               `fill="#999" fill-opacity="0.35" stroke="none"/>`);
  }

  for (const b of layout.boxes) {
    parts.push(`<rect class="node" data-node-id="${esc(b.node.id)}" x="${fmt(b.x)}" ` +
               `y="${fmt(b.y)}" width="${fmt(b.width)}" height="${fmt(b.height)}" ` +
               `fill="${esc(b.node.color)}" stroke="#333" stroke-width="0.5"/>`);
    if (b.height >= 11) {
      const labelX = b.x + b.width + 4;
      const anchor = b.node.month === doc.meta.bin_labels.length - 1 ? "end" : "start";
      const x = anchor === "end" ? b.x - 4 : labelX;
      parts.push(`<text x="${fmt(x)}" y="${fmt(b.y + b.height / 2 + 4)}" ` +
                 `text-anchor="${anchor}" pointer-events="none">` +
                 `${esc(b.node.cluster)} (${b.node.value})</text>`);
    }
  }

  parts.push("</svg>");
  return { svg: parts.join("\n"), layout };
}
