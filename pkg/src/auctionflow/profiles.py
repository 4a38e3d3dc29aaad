"""Behavioral profile labels assigned to clusters by a deterministic cascade."""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import median
from typing import Optional

import numpy as np

from .clustering import ClusterModel
from .metrics import PlayerBinKPI, _pop_sd

#: fixed global ordering of labels, also the stacking order inside Sankey bins
LABELS = (
    "Hardcore",
    "Forum",
    "Moderate",
    "ModerateFarmers",
    "ModerateMiscellanea",
    "ModerateWinners",
    "ModerateLosers",
    "Casual",
    "CasualWinners",
    "CasualLosers",
    "CasualForum",
)

LABEL_DESCRIPTIONS = {
    "Hardcore": "Top of every activity measure; the most committed traders.",
    "Forum": "Hardcore-like trading paired with marketplace forum posting.",
    "Moderate": "Mid-range activity without a sharper sub-pattern.",
    "ModerateFarmers": "Many daily postings over a narrow set of categories.",
    "ModerateMiscellanea": "Broad category range at a leisurely posting pace.",
    "ModerateWinners": "Mid-range activity with a high sale rate.",
    "ModerateLosers": "Mid-range activity with a poor sale rate.",
    "Casual": "Low activity, middling success.",
    "CasualWinners": "Low activity; every auction sells.",
    "CasualLosers": "Low activity and low sale rate.",
    "CasualForum": "Low trading activity but active on the marketplace forum.",
}

BASE_FAMILY = {
    "Hardcore": "Hardcore", "Forum": "Forum", "CasualForum": "Forum",
    "Moderate": "Moderate", "ModerateFarmers": "Moderate",
    "ModerateMiscellanea": "Moderate", "ModerateWinners": "Moderate",
    "ModerateLosers": "Moderate",
    "Casual": "Casual", "CasualWinners": "Casual", "CasualLosers": "Casual",
}

# base family -> shade variants; stable across runs
_PALETTE = {
    "Hardcore": ["#8c2d04"],
    "Forum": ["#54278f", "#9e9ac8"],
    "Moderate": ["#08519c", "#3182bd", "#6baed6", "#9ecae1", "#c6dbef"],
    "Casual": ["#006d2c", "#31a354", "#74c476"],
}


def label_color(label: str) -> str:
    family = BASE_FAMILY[label]
    variants = [l for l in LABELS if BASE_FAMILY[l] == family]
    return _PALETTE[family][variants.index(label) % len(_PALETTE[family])]


@dataclass(slots=True)
class LabelingThresholds:
    activity_low: float = 2.0      # A <= low  -> Casual family
    activity_high: float = 4.0     # A >= high -> Hardcore
    forum_cut: float = 3.0         # F >= cut  -> Forum family
    winner_quintile: float = 4.0   # moderate S >= this -> ModerateWinners
    loser_quintile: float = 2.0    # moderate S <= this -> ModerateLosers
    casual_winner_rate: float = 1.0
    casual_loser_rate: float = 0.5


@dataclass(slots=True)
class LabeledCluster:
    cluster_id: int
    label: str
    size: int
    raw_centroid: dict             # feature name -> mean of raw KPI over members
    merged_from: list = field(default_factory=list)


@dataclass(slots=True)
class LabeledClustering:
    bin_index: int
    clusters: list                 # LabeledCluster, one per distinct label


def _raw_centroids(model: ClusterModel, kpis: list[PlayerBinKPI]):
    raw = []
    for c in range(model.k):
        members = [kpis[i] for i in range(len(kpis)) if model.assignments[i] == c]
        raw.append({
            "total_auctions": float(np.mean([m.total_auctions for m in members])),
            "avg_auctions_per_active_day": float(np.mean(
                [m.avg_auctions_per_active_day for m in members])),
            "sale_rate": float(np.mean([m.sale_rate for m in members])),
            "distinct_categories": float(np.mean([m.distinct_categories for m in members])),
            "forum_flag": float(np.mean([m.forum_flag for m in members])),
        })
    return raw


def assign_label(std_centroid, raw_centroid, moderate_medians,
                 t: LabelingThresholds) -> str:
    """Rule cascade on one cluster's standardized + raw centroid.

    std_centroid is in KPI feature order (quintile space); A is the mean
    activity quintile, S the sale-rate quintile, F the forum coordinate.
    """
    A = (std_centroid[0] + std_centroid[1] + std_centroid[3]) / 3.0
    S = std_centroid[2]
    F = std_centroid[4]
    if F >= t.forum_cut:
        return "Forum" if A >= t.forum_cut else "CasualForum"
    if A >= t.activity_high:
        return "Hardcore"
    if A > t.activity_low:
        med_cats, med_rate = moderate_medians
        cats = raw_centroid["distinct_categories"]
        rate = raw_centroid["avg_auctions_per_active_day"]
        if cats < med_cats and rate > med_rate:
            return "ModerateFarmers"
        if cats > med_cats and rate < med_rate:
            return "ModerateMiscellanea"
        if S <= t.loser_quintile:
            return "ModerateLosers"
        if S >= t.winner_quintile:
            return "ModerateWinners"
        return "Moderate"
    if raw_centroid["sale_rate"] >= t.casual_winner_rate:
        return "CasualWinners"
    if raw_centroid["sale_rate"] <= t.casual_loser_rate:
        return "CasualLosers"
    return "Casual"


def label_clusters(model: ClusterModel, kpis: list[PlayerBinKPI],
                   thresholds: Optional[LabelingThresholds] = None) -> LabeledClustering:
    """Label every cluster of one bin; same-label clusters merge."""
    t = thresholds or LabelingThresholds()
    if len(kpis) != len(model.assignments):
        raise ValueError("KPI rows do not align with model assignments")
    bin_index = kpis[0].bin_index
    raw = _raw_centroids(model, kpis)
    std = model.centroids

    def activity(c):
        return (std[c][0] + std[c][1] + std[c][3]) / 3.0

    moderate_ids = [c for c in range(model.k)
                    if t.activity_low < activity(c) < t.activity_high
                    and std[c][4] < t.forum_cut]
    if moderate_ids:
        med_cats = median(raw[c]["distinct_categories"] for c in moderate_ids)
        med_rate = median(raw[c]["avg_auctions_per_active_day"] for c in moderate_ids)
    else:
        med_cats = med_rate = 0.0

    sizes = np.bincount(model.assignments, minlength=model.k)
    by_label: dict = {}
    for c in range(model.k):
        label = assign_label(std[c], raw[c], (med_cats, med_rate), t)
        if label in by_label:
            prev = by_label[label]
            total = prev.size + int(sizes[c])
            merged = {
                f: (prev.raw_centroid[f] * prev.size + raw[c][f] * int(sizes[c])) / total
                for f in prev.raw_centroid
            }
            prev.merged_from.append(c)
            prev.size = total
            prev.raw_centroid = merged
        else:
            by_label[label] = LabeledCluster(c, label, int(sizes[c]), raw[c], [c])
    ordered = [by_label[l] for l in LABELS if l in by_label]
    return LabeledClustering(bin_index, ordered)


@dataclass(slots=True)
class ClusterSizeRow:
    label: str
    mean_share: float
    sd_share: float
    months_manifested: int


def cluster_size_table(labeled_bins: list[LabeledClustering]) -> list[ClusterSizeRow]:
    """Share statistics per label over the months where it appears."""
    if not labeled_bins:
        raise ValueError("no labeled bins")
    shares: dict = {}
    for lb in labeled_bins:
        total = sum(c.size for c in lb.clusters)
        for c in lb.clusters:
            shares.setdefault(c.label, []).append(c.size / total)
    rows = []
    for label in LABELS:
        if label in shares:
            vals = shares[label]
            rows.append(ClusterSizeRow(label, sum(vals) / len(vals),
                                       _pop_sd(vals), len(vals)))
    return rows
