"""Per-item price analytics against vendor street prices.

A vendor pays 70% of an item's street price, so a sale is a "success" when
its unit price strictly exceeds that vendor value. Trend classification fits
a least-squares line through per-granule median unit prices.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional

from .ingest import AuctionRecord, StreetPriceTable

VENDOR_FRACTION = 0.7


class ValuationSignal(Exception):
    """Non-fatal per-item condition: no price, no data, undefined statistic."""


@dataclass(slots=True)
class ItemPriceSeries:
    item_name: str
    observations: list    # (timestamp, unit_price), weakly ascending timestamps


@dataclass(slots=True)
class ItemValuationReport:
    item_name: str
    n_sales: int
    success_ratio: Optional[float]
    above_street_share: Optional[float]
    skew_class: Optional[str]
    skewness: Optional[float]
    trend_class: Optional[str]
    relative_change: Optional[float]
    street_price: Optional[float]


def build_price_series(records: Iterable[AuctionRecord]) -> dict:
    """SOLD auctions only; unit price = total_price / quantity."""
    obs = defaultdict(list)
    for r in records:
        if r.outcome == "SOLD":
            obs[r.item_name].append((r.created_at, r.total_price / r.quantity))
    return {item: ItemPriceSeries(item, sorted(o)) for item, o in sorted(obs.items())}


def _in_window(series: ItemPriceSeries, window) -> list:
    if window is None:
        return [p for _, p in series.observations]
    lo, hi = window
    return [p for ts, p in series.observations if lo <= ts < hi]


def _threshold_share(series, street: StreetPriceTable, window, threshold_factor):
    if series.item_name not in street.entries:
        raise ValuationSignal(f"unpriced item: {series.item_name}")
    prices = _in_window(series, window)
    if not prices:
        raise ValuationSignal(f"no sales in window: {series.item_name}")
    cut = threshold_factor * street.entries[series.item_name]
    return sum(1 for p in prices if p > cut) / len(prices)


def success_ratio(series: ItemPriceSeries, street: StreetPriceTable,
                  window=None) -> float:
    """Share of sales strictly above the vendor value (70% of street)."""
    return _threshold_share(series, street, window, VENDOR_FRACTION)


def above_street_share(series: ItemPriceSeries, street: StreetPriceTable,
                       window=None) -> float:
    """Share of sales strictly above the full street price."""
    return _threshold_share(series, street, window, 1.0)


def sample_skewness(values) -> float:
    """Adjusted Fisher-Pearson sample skewness (the g1 * n-correction form)."""
    n = len(values)
    mean = sum(values) / n
    s2 = sum((v - mean) ** 2 for v in values) / (n - 1)
    s = math.sqrt(s2)
    if s == 0:
        raise ValuationSignal("zero variance")
    return (n / ((n - 1) * (n - 2))) * sum(((v - mean) / s) ** 3 for v in values)


def classify_skew(series: ItemPriceSeries, strong_cut: float = 2.0,
                  mild_cut: float = 0.5) -> tuple[str, float]:
    prices = [p for _, p in series.observations]
    if len(prices) < 3:
        raise ValuationSignal("need >= 3 observations for skewness")
    g = sample_skewness(prices)
    if g >= strong_cut:
        cls = "strong-right"
    elif g >= mild_cut:
        cls = "mild"
    else:
        cls = "none/left"
    return cls, g


def _week_index(ts: int) -> int:
    return (ts - 345600) // 604800  # epoch day 0 was a Thursday; align Monday


def classify_trend(series: ItemPriceSeries, window=None, granularity: str = "week",
                   change_cut: float = 0.10) -> tuple[str, float]:
    """Least-squares line over per-granule median unit prices.

    relative change = slope x (granule span) / mean of granule medians;
    appreciated at >= +change_cut, depreciated at <= -change_cut, else flat.
    """
    obs = series.observations
    if window is not None:
        lo, hi = window
        obs = [(ts, p) for ts, p in obs if lo <= ts < hi]
    if granularity == "week":
        key = _week_index
    elif granularity == "day":
        key = lambda ts: ts // 86400
    else:
        raise ValueError(f"unknown granularity {granularity!r}")
    grouped = defaultdict(list)
    for ts, p in obs:
        grouped[key(ts)].append(p)
    if len(grouped) < 2:
        raise ValuationSignal("need >= 2 granules with sales")
    xs = sorted(grouped)
    ys = [_median(grouped[x]) for x in xs]
    slope = _ls_slope(xs, ys)
    mean_y = sum(ys) / len(ys)
    span = xs[-1] - xs[0]
    rel = slope * span / mean_y if mean_y != 0 else 0.0
    if rel >= change_cut:
        cls = "appreciated"
    elif rel <= -change_cut:
        cls = "depreciated"
    else:
        cls = "flat"
    return cls, rel


def _median(values):
    s = sorted(values)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2


def _ls_slope(xs, ys) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    denom = sum((x - mx) ** 2 for x in xs)
    if denom == 0:
        return 0.0
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom


def volatility_summary(all_series: dict, window_a, window_b,
                       granularity: str = "week", change_cut: float = 0.10) -> dict:
    """Trend-class distributions per window over items with enough granules."""
    out = {}
    for name, window in (("window_a", window_a), ("window_b", window_b)):
        counts = {"appreciated": 0, "depreciated": 0, "flat": 0}
        total = 0
        for series in all_series.values():
            try:
                cls, _ = classify_trend(series, window, granularity, change_cut)
            except ValuationSignal:
                continue
            counts[cls] += 1
            total += 1
        out[name] = ({c: v / total for c, v in counts.items()} if total
                     else {c: 0.0 for c in counts})
    return out


def valuation_reports(all_series: dict, street: StreetPriceTable,
                      window=None, skew_strong: float = 2.0,
                      trend_cut: float = 0.10) -> list[ItemValuationReport]:
    reports = []
    for item, series in all_series.items():
        n_sales = len(_in_window(series, window))
        price = street.entries.get(item)
        succ = above = None
        if price is not None and n_sales:
            succ = success_ratio(series, street, window)
            above = above_street_share(series, street, window)
        skew_cls = skew_val = None
        try:
            skew_cls, skew_val = classify_skew(series, strong_cut=skew_strong)
        except ValuationSignal:
            pass
        trend_cls = rel = None
        try:
            trend_cls, rel = classify_trend(series, window, change_cut=trend_cut)
        except ValuationSignal:
            pass
        reports.append(ItemValuationReport(item, n_sales, succ, above,
                                           skew_cls, skew_val, trend_cls, rel, price))
    return reports
