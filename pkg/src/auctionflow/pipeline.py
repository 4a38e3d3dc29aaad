"""Stage orchestration: each stage reads prior stages' files from the output
directory and persists its own, so any stage can be rerun in isolation."""

from __future__ import annotations

import datetime as dt
import json
import os
import sys
from types import SimpleNamespace

import numpy as np

from . import clustering, export, flows, ingest, metrics, profiles, valuation
from .config import PipelineConfig
from .metrics import KPI_FEATURES
from .profiles import LabelingThresholds


class MissingArtifact(Exception):
    def __init__(self, path: str, stage: str):
        super().__init__(f"missing upstream artifact {path!r}; run the {stage!r} stage first")
        self.path = path


def _stages_dir(cfg) -> str:
    return os.path.join(cfg.out_dir, "stages")


def _stage_path(cfg, name: str) -> str:
    return os.path.join(_stages_dir(cfg), name)


def _require(cfg, name: str, stage: str) -> str:
    path = _stage_path(cfg, name)
    if not os.path.exists(path):
        raise MissingArtifact(path, stage)
    return path


def _dump_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------

def stage_ingest(cfg: PipelineConfig) -> None:
    os.makedirs(_stages_dir(cfg), exist_ok=True)
    with open(cfg.auctions_path, encoding="utf-8", newline="") as fh:
        records, report = ingest.parse_auctions(fh, cfg.schema_map or None, cfg.delimiter)
    print(f"auctions: {len(records)} records; {report.summary()}", file=sys.stderr)
    if not records:
        raise ValueError("no auction records parsed")
    with open(_stage_path(cfg, "records.csv"), "w", encoding="utf-8", newline="") as fh:
        ingest.records_to_csv(records, fh)

    posts = []
    if cfg.forum_path:
        mkt_ids = None
        if cfg.marketplace_ids_path:
            with open(cfg.marketplace_ids_path, encoding="utf-8") as fh:
                mkt_ids = {line.strip() for line in fh if line.strip()}
        with open(cfg.forum_path, encoding="utf-8", newline="") as fh:
            posts, forum_report = ingest.parse_forum(fh, mkt_ids, cfg.delimiter)
        print(f"forum: {len(posts)} posts; {forum_report.summary()}", file=sys.stderr)
    _dump_json(_stage_path(cfg, "forum.json"),
               [[p.player_id, p.posted_at, p.comment_index, p.is_marketplace]
                for p in posts])

    entries = {}
    snapshot = None
    if cfg.street_prices_path:
        with open(cfg.street_prices_path, encoding="utf-8", newline="") as fh:
            table, sp_report = ingest.parse_street_prices(fh, delimiter=cfg.delimiter)
        entries, snapshot = table.entries, table.snapshot_date
        print(f"street prices: {len(entries)} items; {sp_report.summary()}", file=sys.stderr)
    _dump_json(_stage_path(cfg, "street_prices.json"),
               {"snapshot_date": snapshot, "entries": entries})


def _load_records(cfg, stage_needed: str) -> list:
    path = _require(cfg, "records.csv", stage_needed)
    with open(path, encoding="utf-8", newline="") as fh:
        records, _ = ingest.parse_auctions(fh)
    return records


def _load_forum(cfg) -> list:
    path = _require(cfg, "forum.json", "ingest")
    return [ingest.ForumPost(p, ts, ci, flag) for p, ts, ci, flag in _load_json(path)]


def stage_stats(cfg: PipelineConfig) -> None:
    records = _load_records(cfg, "ingest")
    binned = ingest.bin_records(records, cfg.granularity)
    activity = metrics.activity_summary(records, binned)
    conc = metrics.concentration(records)
    cohort = metrics.cohort_matrix(binned)
    fees = metrics.operator_fees(records, [tuple(t) for t in cfg.fee_schedule], binned)
    n_players = len({r.player_id for r in records})
    doc = {
        "counts": {
            "records": len(records),
            "players": n_players,
            "items": len({r.item_name for r in records}),
            "categories": len({r.category for r in records}),
            "bins": binned.n_bins,
        },
        "activity": {
            "mean_daily": activity.mean_daily,
            "sd_daily": activity.sd_daily,
            "max_daily": [str(activity.max_daily[0]), activity.max_daily[1]],
            "min_daily": [str(activity.min_daily[0]), activity.min_daily[1]],
            "mean_monthly": activity.mean_monthly,
            "sd_monthly": activity.sd_monthly,
            "max_monthly": list(activity.max_monthly),
            "min_monthly": list(activity.min_monthly),
            "per_player_mean": activity.per_player_mean,
            "per_player_sd": activity.per_player_sd,
            "per_player_range": list(activity.per_player_range),
            "overall_sale_rate": activity.overall_sale_rate,
            "monthly_sale_rate_sd": activity.monthly_sale_rate_sd,
            "per_player_month_sale_rate_mean": activity.per_player_month_sale_rate_mean,
            "per_player_month_sale_rate_sd": activity.per_player_month_sale_rate_sd,
        },
        "concentration": {
            "category_shares": conc.category_shares,
            "item_shares": conc.item_shares,
            "top5_category_share": conc.top5_category_share,
            "top10_category_share": conc.top10_category_share,
            "top5_item_share": conc.top5_item_share,
            "top10_item_share": conc.top10_item_share,
        },
        "cohort": {
            "join_labels": cohort.join_labels,
            "cells": cohort.cells,
            "row_totals": cohort.row_totals,
            "row_percentages": cohort.row_percentages,
        },
        "fees_per_bin": fees.per_bin_totals,
    }
    _dump_json(_stage_path(cfg, "stats.json"), doc)


def kpis_to_matrix(bin_kpis: list) -> clustering.FeatureMatrix:
    values = np.array([[k.total_auctions, k.avg_auctions_per_active_day,
                        k.sale_rate, k.distinct_categories, float(k.forum_flag)]
                       for k in bin_kpis], dtype=np.float64)
    return clustering.FeatureMatrix(values, KPI_FEATURES, (False, False, False, False, True),
                                    row_ids=[k.player_id for k in bin_kpis])


def stage_cluster(cfg: PipelineConfig) -> None:
    records = _load_records(cfg, "ingest")
    posts = _load_forum(cfg)
    binned = ingest.bin_records(records, cfg.granularity)
    kpis = metrics.compute_kpis(binned, posts)
    by_bin: dict = {}
    for k in kpis:
        by_bin.setdefault(k.bin_index, []).append(k)

    bins_out = []
    for b in binned.bins:
        rows = by_bin.get(b.index, [])
        if not rows:
            bins_out.append({"bin_index": b.index, "bin_label": b.label,
                             "empty": True})
            continue
        matrix = kpis_to_matrix(rows)
        std = clustering.quintile_standardize(matrix)
        chosen, report, models = clustering.select_k(
            std, range(cfg.k_min, cfg.k_max + 1), cfg.wb_threshold,
            cfg.restarts, cfg.seed, cfg.max_iter)
        model = models[chosen]
        bins_out.append({
            "bin_index": b.index,
            "bin_label": b.label,
            "empty": False,
            "k": chosen,
            "k_report": report.entries,
            "truncated_range": report.truncated,
            "converged": model.converged,
            "sse": model.sse,
            "trace_w": model.trace_w,
            "trace_b": model.trace_b,
            "trace_t": model.trace_t,
            "seed": model.seed,
            "best_restart": model.best_restart,
            "centroids": [[float(v) for v in row] for row in model.centroids],
            "assignments": [int(a) for a in model.assignments],
            "kpis": [[k.player_id, k.total_auctions, k.avg_auctions_per_active_day,
                      k.sale_rate, k.distinct_categories, k.forum_flag]
                     for k in rows],
        })
    _dump_json(_stage_path(cfg, "clusters.json"), {"bins": bins_out})


def _thresholds(cfg) -> LabelingThresholds:
    return LabelingThresholds(cfg.activity_low, cfg.activity_high, cfg.forum_cut,
                              cfg.winner_quintile, cfg.loser_quintile,
                              cfg.casual_winner_rate, cfg.casual_loser_rate)


def stage_label(cfg: PipelineConfig) -> None:
    doc = _load_json(_require(cfg, "clusters.json", "cluster"))
    labeled_bins = []
    out_bins = []
    for b in doc["bins"]:
        if b.get("empty"):
            continue
        rows = [metrics.PlayerBinKPI(p, b["bin_index"], t, a, s, c, bool(f))
                for p, t, a, s, c, f in b["kpis"]]
        model = SimpleNamespace(k=b["k"], centroids=np.array(b["centroids"]),
                                assignments=np.array(b["assignments"]))
        lc = profiles.label_clusters(model, rows, _thresholds(cfg))
        labeled_bins.append(lc)
        player_labels = {}
        cluster_label = {}
        for c in lc.clusters:
            for cid in c.merged_from:
                cluster_label[cid] = c.label
        for row, a in zip(rows, b["assignments"]):
            player_labels[row.player_id] = cluster_label[a]
        out_bins.append({
            "bin_index": b["bin_index"],
            "bin_label": b["bin_label"],
            "clusters": [{"cluster_id": c.cluster_id, "label": c.label,
                          "size": c.size, "raw_centroid": c.raw_centroid,
                          "merged_from": c.merged_from} for c in lc.clusters],
            "player_labels": player_labels,
        })
    size_table = profiles.cluster_size_table(labeled_bins)
    _dump_json(_stage_path(cfg, "labeled.json"), {
        "bins": out_bins,
        "size_table": [{"label": r.label, "mean_share": r.mean_share,
                        "sd_share": r.sd_share,
                        "months_manifested": r.months_manifested}
                       for r in size_table],
    })


def stage_flows(cfg: PipelineConfig) -> None:
    doc = _load_json(_require(cfg, "labeled.json", "label"))
    assignments = [b["player_labels"] for b in doc["bins"]]
    bin_labels = [b["bin_label"] for b in doc["bins"]]
    graph = flows.build_flow_graph(assignments)
    flows.check_conservation(graph)
    retention = flows.retention_series(assignments) if len(assignments) >= 2 else []
    insularities = {}
    for label in profiles.LABELS:
        try:
            insularities[label] = flows.insularity(graph, label)
        except ValueError:
            pass
    _dump_json(_stage_path(cfg, "flows.json"), {
        "bin_labels": bin_labels,
        "nodes": [{"id": n.node_id, "month": n.bin_index, "cluster": n.label,
                   "value": n.size, "color": n.color, "joining": n.joining,
                   "departing": n.departing, "description": n.description}
                  for n in graph.nodes],
        "links": [{"source": l.source, "target": l.target, "value": l.value}
                  for l in graph.links],
        "retention": retention,
        "insularity": insularities,
        "lifetimes": flows.lifetime_stats(graph),
        "tenure_table": {str(t): v for t, v in
                         flows.distinct_clusters_by_tenure(graph).items()},
        "entry_exit": [dict(d) for d in flows.entry_exit_distribution(graph)],
    })


def _valuation_window(binned, months: int):
    month_bins = binned.bins[-months:]
    return (month_bins[0].start, binned.bins[-1].end)


def stage_valuation(cfg: PipelineConfig) -> None:
    records = _load_records(cfg, "ingest")
    sp = _load_json(_require(cfg, "street_prices.json", "ingest"))
    street = ingest.StreetPriceTable(sp["snapshot_date"], sp["entries"])
    binned = ingest.bin_records(records, "month")
    window = _valuation_window(binned, cfg.valuation_window_months)
    series = valuation.build_price_series(records)
    reports = valuation.valuation_reports(series, street, window,
                                          cfg.skew_strong_cut, cfg.trend_change_cut)
    hi = max(r.created_at for r in records) + 1
    window_b = (hi - cfg.volatility_window_weeks * 7 * 86400, hi)
    vol = valuation.volatility_summary(series, window, window_b,
                                       change_cut=cfg.trend_change_cut)
    _dump_json(_stage_path(cfg, "valuation.json"), {
        "window": list(window),
        "items": [{"item": r.item_name, "n_sales": r.n_sales,
                   "success_ratio": r.success_ratio,
                   "above_street_share": r.above_street_share,
                   "skew_class": r.skew_class, "skewness": r.skewness,
                   "trend_class": r.trend_class,
                   "relative_change": r.relative_change,
                   "street_price": r.street_price} for r in reports],
        "volatility": vol,
    })


def stage_export(cfg: PipelineConfig) -> None:
    stats = _load_json(_require(cfg, "stats.json", "stats"))
    labeled = _load_json(_require(cfg, "labeled.json", "label"))
    flow_doc = _load_json(_require(cfg, "flows.json", "flows"))
    val_doc = _load_json(_require(cfg, "valuation.json", "valuation"))

    graph = export.document_to_graph({"meta": {}, "nodes": flow_doc["nodes"],
                                      "links": flow_doc["links"]})
    text = export.emit_sankey(graph, flow_doc["bin_labels"], flow_doc["retention"])
    sankey_path = os.path.join(cfg.out_dir, "clusters" + export.SANKEY_EXTENSION)
    with open(sankey_path, "w", encoding="utf-8") as fh:
        fh.write(text)

    a = stats["activity"]
    activity = SimpleNamespace(
        mean_daily=a["mean_daily"], sd_daily=a["sd_daily"],
        max_daily=tuple(a["max_daily"]), min_daily=tuple(a["min_daily"]),
        mean_monthly=a["mean_monthly"], sd_monthly=a["sd_monthly"],
        max_monthly=tuple(a["max_monthly"]), min_monthly=tuple(a["min_monthly"]),
        per_player_mean=a["per_player_mean"], per_player_sd=a["per_player_sd"],
        per_player_range=tuple(a["per_player_range"]),
        overall_sale_rate=a["overall_sale_rate"],
        monthly_sale_rate_sd=a["monthly_sale_rate_sd"],
        per_player_month_sale_rate_mean=a["per_player_month_sale_rate_mean"],
        per_player_month_sale_rate_sd=a["per_player_month_sale_rate_sd"])
    c = stats["concentration"]
    conc = SimpleNamespace(
        category_shares=[tuple(x) for x in c["category_shares"]],
        item_shares=[tuple(x) for x in c["item_shares"]],
        top5_category_share=c["top5_category_share"],
        top10_category_share=c["top10_category_share"],
        top5_item_share=c["top5_item_share"],
        top10_item_share=c["top10_item_share"])
    ch = stats["cohort"]
    cohort = metrics.CohortMatrix(ch["join_labels"], ch["cells"],
                                  ch["row_totals"], ch["row_percentages"])
    size_table = [profiles.ClusterSizeRow(r["label"], r["mean_share"],
                                          r["sd_share"], r["months_manifested"])
                  for r in labeled["size_table"]]
    items = [valuation.ItemValuationReport(
        r["item"], r["n_sales"], r["success_ratio"], r["above_street_share"],
        r["skew_class"], r["skewness"], r["trend_class"], r["relative_change"],
        r["street_price"]) for r in val_doc["items"]]

    export.emit_reports(
        os.path.join(cfg.out_dir, "reports"),
        activity=activity, conc=conc, cohort=cohort, size_table=size_table,
        tenure_table={int(t): v for t, v in flow_doc["tenure_table"].items()},
        retention=flow_doc["retention"], bin_labels=flow_doc["bin_labels"],
        insularities=flow_doc["insularity"], lifetimes=flow_doc["lifetimes"],
        valuation_items=items, valuation_aggregate=val_doc["volatility"],
        fee_per_bin=stats["fees_per_bin"])


STAGES = {
    "ingest": stage_ingest,
    "stats": stage_stats,
    "cluster": stage_cluster,
    "label": stage_label,
    "flows": stage_flows,
    "valuation": stage_valuation,
    "export": stage_export,
}

STAGE_ORDER = ("ingest", "stats", "cluster", "label", "flows", "valuation", "export")


def run_all(cfg: PipelineConfig) -> None:
    for name in STAGE_ORDER:
        print(f"[auctionflow] stage: {name}", file=sys.stderr)
        STAGES[name](cfg)
