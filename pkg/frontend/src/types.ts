export interface SankeyMeta {
  bin_labels: string[];
  total_players_per_bin: number[];
  retention_per_bin: number[];
}

export interface SankeyNode {
  id: string;
  month: number;
  cluster: string;
  value: number;
  color: string;
  joining: number;
  departing: number;
  description: string;
}

export interface SankeyLink {
  source: string;
  target: string;
  value: number;
}

export interface SankeyDocument {
  meta: SankeyMeta;
  nodes: SankeyNode[];
  links: SankeyLink[];
}
