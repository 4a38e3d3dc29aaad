import type { SankeyDocument, SankeyLink, SankeyNode } from "./types.js";

export class DocumentError extends Error {
  readonly problems: string[];
  constructor(problems: string[]) {
    super(`invalid document: ${problems.join("; ")}`);
    this.problems = problems;
  }
}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

const NODE_FIELDS: [keyof SankeyNode, string][] = [
  ["id", "string"], ["month", "number"], ["cluster", "string"],
  ["value", "number"], ["color", "string"], ["joining", "number"],
  ["departing", "number"], ["description", "string"],
];

const LINK_FIELDS: [keyof SankeyLink, string][] = [
  ["source", "string"], ["target", "string"], ["value", "number"],
];

/** Parse and fully validate a raw document; throws DocumentError. */
export function validateDocument(raw: unknown): SankeyDocument {
  const problems: string[] = [];
  if (!isRecord(raw)) {
    throw new DocumentError(["document is not a JSON object"]);
  }
  for (const key of ["meta", "nodes", "links"]) {
    if (!(key in raw)) problems.push(`missing top-level key '${key}'`);
  }
  if (problems.length) throw new DocumentError(problems);

  const meta = raw.meta;
  if (!isRecord(meta) || !Array.isArray(meta.bin_labels)
      || !Array.isArray(meta.total_players_per_bin)
      || !Array.isArray(meta.retention_per_bin)) {
    problems.push("meta must contain bin_labels, total_players_per_bin, retention_per_bin arrays");
    throw new DocumentError(problems);
  }
  if (!Array.isArray(raw.nodes) || !Array.isArray(raw.links)) {
    throw new DocumentError(["nodes and links must be arrays"]);
  }

  const nodes = raw.nodes as unknown[];
  const links = raw.links as unknown[];
  const ids = new Set<string>();
  nodes.forEach((n, i) => {
    if (!isRecord(n)) { problems.push(`node ${i} is not an object`); return; }
    for (const [field, type] of NODE_FIELDS) {
      if (typeof n[field] !== type) problems.push(`node ${i}: bad '${field}'`);
    }
    const id = n.id;
    if (typeof id === "string") {
      if (ids.has(id)) problems.push(`duplicate node id '${id}'`);
      ids.add(id);
    }
  });
  links.forEach((l, i) => {
    if (!isRecord(l)) { problems.push(`link ${i} is not an object`); return; }
    for (const [field, type] of LINK_FIELDS) {
      if (typeof l[field] !== type) problems.push(`link ${i}: bad '${field}'`);
    }
    if (typeof l.source === "string" && !ids.has(l.source)) {
      problems.push(`link ${i}: unknown source '${l.source}'`);
    }
    if (typeof l.target === "string" && !ids.has(l.target)) {
      problems.push(`link ${i}: unknown target '${l.target}'`);
    }
  });
  if (problems.length) throw new DocumentError(problems);

  const doc = raw as unknown as SankeyDocument;
  const byId = new Map(doc.nodes.map((n) => [n.id, n]));

  // links only connect adjacent columns, in ascending month order
  for (const l of doc.links) {
    const s = byId.get(l.source)!;
    const t = byId.get(l.target)!;
    if (t.month !== s.month + 1) {
      problems.push(`link ${l.source} -> ${l.target} does not span adjacent months`);
    }
    if (l.value < 1) problems.push(`link ${l.source} -> ${l.target}: value < 1`);
  }

  // flow conservation at every node
  const incoming = new Map<string, number>();
  const outgoing = new Map<string, number>();
  for (const l of doc.links) {
    incoming.set(l.target, (incoming.get(l.target) ?? 0) + l.value);
    outgoing.set(l.source, (outgoing.get(l.source) ?? 0) + l.value);
  }
  for (const n of doc.nodes) {
    if (n.value !== n.joining + (incoming.get(n.id) ?? 0)) {
      problems.push(`node ${n.id}: value != joining + inflow`);
    }
    if (n.value !== n.departing + (outgoing.get(n.id) ?? 0)) {
      problems.push(`node ${n.id}: value != departing + outflow`);
    }
  }

  const nBins = Math.max(...doc.nodes.map((n) => n.month), -1) + 1;
  if (doc.meta.bin_labels.length !== nBins) {
    problems.push(`meta.bin_labels has ${doc.meta.bin_labels.length} entries for ${nBins} columns`);
  }
  const columnTotals = new Array<number>(nBins).fill(0);
  for (const n of doc.nodes) columnTotals[n.month] += n.value;
  doc.meta.total_players_per_bin.forEach((total, t) => {
    if (columnTotals[t] !== total) {
      problems.push(`meta.total_players_per_bin[${t}] = ${total} but nodes sum to ${columnTotals[t]}`);
    }
  });

  if (problems.length) throw new DocumentError(problems);
  return doc;
}
