"""Serialization: the Sankey JSON document and all tabular reports.

Key order inside the document is fixed (meta, nodes, links; field order as
written below) and counts are integers, fractions rounded to 6 decimal
places, so identical inputs always produce byte-identical output.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Optional

from .flows import FlowGraph, FlowLink, FlowNode, check_conservation

SANKEY_EXTENSION = ".sankey.json"


def _round6(x: float) -> float:
    return round(x, 6)


def sankey_document(graph: FlowGraph, bin_labels: list,
                    retention: Optional[list] = None) -> dict:
    """Build the document dict in its canonical key order."""
    check_conservation(graph)
    sizes_per_bin = [0] * graph.n_bins
    for node in graph.nodes:
        sizes_per_bin[node.bin_index] += node.size
    if len(bin_labels) != graph.n_bins:
        raise ValueError("bin_labels length does not match graph bins")
    meta = {
        "bin_labels": list(bin_labels),
        "total_players_per_bin": sizes_per_bin,
        "retention_per_bin": [_round6(r) for r in (retention or [])],
    }
    nodes = [{
        "id": n.node_id,
        "month": n.bin_index,
        "cluster": n.label,
        "value": n.size,
        "color": n.color,
        "joining": n.joining,
        "departing": n.departing,
        "description": n.description,
    } for n in graph.nodes]
    links = [{"source": l.source, "target": l.target, "value": l.value}
             for l in graph.links]
    ids = [n["id"] for n in nodes]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    id_set = set(ids)
    for l in links:
        if l["source"] not in id_set or l["target"] not in id_set:
            raise ValueError(f"dangling link {l['source']} -> {l['target']}")
    return {"meta": meta, "nodes": nodes, "links": links}


def emit_sankey(graph: FlowGraph, bin_labels: list,
                retention: Optional[list] = None) -> str:
    doc = sankey_document(graph, bin_labels, retention)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_sankey(text: str) -> dict:
    doc = json.loads(text)
    for key in ("meta", "nodes", "links"):
        if key not in doc:
            raise ValueError(f"missing top-level key {key!r}")
    return doc


def document_to_graph(doc: dict) -> FlowGraph:
    """Rebuild a FlowGraph (without trajectories) from a parsed document."""
    nodes = [FlowNode(n["id"], n["month"], n["cluster"], n["value"],
                      n["joining"], n["departing"], n["color"], n["description"])
             for n in doc["nodes"]]
    links = [FlowLink(l["source"], l["target"], l["value"]) for l in doc["links"]]
    n_bins = max((n.bin_index for n in nodes), default=-1) + 1
    return FlowGraph(nodes, links, {}, n_bins)


# ---------------------------------------------------------------------------
# tabular reports

def _write_table(path: str, header: list, rows: list) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


REPORT_FILES = (
    "activity_summary.csv",
    "concentration.csv",
    "cohort_matrix.csv",
    "cluster_sizes.csv",
    "distinct_clusters_by_tenure.csv",
    "retention.csv",
    "insularity.csv",
    "lifetimes.csv",
    "valuation_items.csv",
    "valuation_aggregate.csv",
    "fee_ledger.csv",
)


def emit_reports(out_dir: str, *, activity, conc, cohort, size_table,
                 tenure_table, retention, bin_labels, insularities,
                 lifetimes, valuation_items, valuation_aggregate,
                 fee_per_bin) -> list:
    """Write the 11 report tables; returns the file paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    def table(name, header, rows):
        path = os.path.join(out_dir, name)
        _write_table(path, header, [[_fmt(v) for v in row] for row in rows])
        paths.append(path)

    table("activity_summary.csv", ["statistic", "value"], [
        ["mean_daily", activity.mean_daily],
        ["sd_daily", activity.sd_daily],
        ["max_daily_date", activity.max_daily[0]],
        ["max_daily_count", activity.max_daily[1]],
        ["min_daily_date", activity.min_daily[0]],
        ["min_daily_count", activity.min_daily[1]],
        ["mean_monthly", activity.mean_monthly],
        ["sd_monthly", activity.sd_monthly],
        ["max_month", activity.max_monthly[0]],
        ["max_month_count", activity.max_monthly[1]],
        ["min_month", activity.min_monthly[0]],
        ["min_month_count", activity.min_monthly[1]],
        ["per_player_mean", activity.per_player_mean],
        ["per_player_sd", activity.per_player_sd],
        ["per_player_min", activity.per_player_range[0]],
        ["per_player_max", activity.per_player_range[1]],
        ["overall_sale_rate", activity.overall_sale_rate],
        ["monthly_sale_rate_sd", activity.monthly_sale_rate_sd],
        ["per_player_month_sale_rate_mean", activity.per_player_month_sale_rate_mean],
        ["per_player_month_sale_rate_sd", activity.per_player_month_sale_rate_sd],
    ])
    table("concentration.csv", ["kind", "name", "share"],
          [["category", c, s] for c, s in conc.category_shares]
          + [["item", i, s] for i, s in conc.item_shares]
          + [["top5_categories", "", conc.top5_category_share],
             ["top10_categories", "", conc.top10_category_share],
             ["top5_items", "", conc.top5_item_share],
             ["top10_items", "", conc.top10_item_share]])
    table("cohort_matrix.csv",
          ["months_active"] + cohort.join_labels + ["row_total", "row_pct"],
          [[n + 1] + row + [cohort.row_totals[n], cohort.row_percentages[n]]
           for n, row in enumerate(cohort.cells)])
    table("cluster_sizes.csv",
          ["cluster", "mean_share", "sd_share", "months_manifested"],
          [[r.label, r.mean_share, r.sd_share, r.months_manifested]
           for r in size_table])
    table("distinct_clusters_by_tenure.csv",
          ["months_played", "mean_distinct_clusters"],
          [[t, v] for t, v in tenure_table.items()])
    table("retention.csv", ["bin", "retention"],
          [[bin_labels[i], r] for i, r in enumerate(retention)])
    table("insularity.csv", ["label", "insularity"],
          [[l, v] for l, v in insularities.items()])
    table("lifetimes.csv", ["entry_label", "mean_months_active"],
          [[l, v] for l, v in lifetimes.items()])
    table("valuation_items.csv",
          ["item", "n_sales", "success_ratio", "above_street_share",
           "skew_class", "skewness", "trend_class", "relative_change",
           "street_price"],
          [[r.item_name, r.n_sales,
            "" if r.success_ratio is None else _fmt(r.success_ratio),
            "" if r.above_street_share is None else _fmt(r.above_street_share),
            r.skew_class or "", "" if r.skewness is None else _fmt(r.skewness),
            r.trend_class or "",
            "" if r.relative_change is None else _fmt(r.relative_change),
            "" if r.street_price is None else _fmt(r.street_price)]
           for r in valuation_items])
    table("valuation_aggregate.csv", ["window", "trend_class", "share"],
          [[w, cls, share] for w, dist in valuation_aggregate.items()
           for cls, share in sorted(dist.items())])
    table("fee_ledger.csv", ["bin", "currants"],
          [[b, v] for b, v in fee_per_bin.items()])
    return paths
