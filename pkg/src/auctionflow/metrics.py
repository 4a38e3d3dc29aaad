"""Per-player KPIs, descriptive activity statistics, cohorts and fees."""

from __future__ import annotations

import datetime as dt
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .ingest import UTC, AuctionRecord, BinnedDataset, ForumPost

KPI_FEATURES = ("total_auctions", "avg_auctions_per_active_day",
                "sale_rate", "distinct_categories", "forum_flag")

# fee schedule change: commissions dropped, listing raised to 7%
FEE_CHANGE_TS = int(dt.datetime(2012, 5, 25, tzinfo=UTC).timestamp())
DEFAULT_FEE_SCHEDULE = (
    (-(2**62), 0.03, 0.08),
    (FEE_CHANGE_TS, 0.07, 0.00),
)


@dataclass(frozen=True, slots=True)
class PlayerBinKPI:
    player_id: str
    bin_index: int
    total_auctions: int
    avg_auctions_per_active_day: float
    sale_rate: float
    distinct_categories: int
    forum_flag: bool


def _utc_date(ts: int) -> dt.date:
    return dt.datetime.fromtimestamp(ts, UTC).date()


def compute_kpis(binned: BinnedDataset, posts: Iterable[ForumPost] = ()) -> list[PlayerBinKPI]:
    """One KPI row per (player, bin) with at least one auction posted."""
    # marketplace post timestamps per player, for the forum flag
    mkt_posts = defaultdict(list)
    for p in posts:
        if p.is_marketplace:
            mkt_posts[p.player_id].append(p.posted_at)
    rows = []
    for b, records in zip(binned.bins, binned.records_by_bin):
        per_player = defaultdict(list)
        for r in records:
            per_player[r.player_id].append(r)
        for player in sorted(per_player):
            rs = per_player[player]
            total = len(rs)
            days = len({_utc_date(r.created_at) for r in rs})
            sold = sum(1 for r in rs if r.outcome == "SOLD")
            cats = len({r.category for r in rs})
            flag = any(b.start <= ts < b.end for ts in mkt_posts.get(player, ()))
            rows.append(PlayerBinKPI(player, b.index, total, total / days,
                                     sold / total, cats, flag))
    return rows


def _pop_sd(values) -> float:
    values = list(values)
    m = sum(values) / len(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / len(values))


@dataclass(slots=True)
class ActivitySummary:
    daily_counts: dict
    monthly_counts: dict
    mean_daily: float
    sd_daily: float
    max_daily: tuple     # (date, count)
    min_daily: tuple
    mean_monthly: float
    sd_monthly: float
    max_monthly: tuple   # (bin label, count)
    min_monthly: tuple
    per_player_counts: dict
    per_player_mean: float
    per_player_sd: float
    per_player_range: tuple
    overall_sale_rate: float
    monthly_sale_rate_sd: float
    per_player_month_sale_rate_mean: float
    per_player_month_sale_rate_sd: float


def activity_summary(records: list[AuctionRecord],
                     binned: Optional[BinnedDataset] = None) -> ActivitySummary:
    """Descriptive statistics; population standard deviations throughout."""
    if not records:
        raise ValueError("no records")
    from .ingest import bin_records
    if binned is None:
        binned = bin_records(records, "month")

    daily = Counter(_utc_date(r.created_at) for r in records)
    monthly = {b.label: len(rs) for b, rs in zip(binned.bins, binned.records_by_bin)}
    per_player = Counter(r.player_id for r in records)

    # ties broken by earliest date
    max_day = max(sorted(daily), key=lambda d: daily[d])
    min_day = min(sorted(daily), key=lambda d: daily[d])
    nonzero_months = {k: v for k, v in monthly.items() if v} or monthly
    max_month = max(sorted(nonzero_months), key=lambda m: nonzero_months[m])
    min_month = min(sorted(nonzero_months), key=lambda m: nonzero_months[m])

    sold = sum(1 for r in records if r.outcome == "SOLD")
    monthly_rates = []
    for rs in binned.records_by_bin:
        if rs:
            monthly_rates.append(sum(1 for r in rs if r.outcome == "SOLD") / len(rs))
    pm_rates = []
    for rs in binned.records_by_bin:
        by_player = defaultdict(list)
        for r in rs:
            by_player[r.player_id].append(r)
        for group in by_player.values():
            pm_rates.append(sum(1 for r in group if r.outcome == "SOLD") / len(group))

    counts = list(per_player.values())
    return ActivitySummary(
        daily_counts=dict(sorted(daily.items())),
        monthly_counts=monthly,
        mean_daily=sum(daily.values()) / len(daily),
        sd_daily=_pop_sd(daily.values()),
        max_daily=(max_day, daily[max_day]),
        min_daily=(min_day, daily[min_day]),
        mean_monthly=sum(monthly.values()) / len(monthly),
        sd_monthly=_pop_sd(monthly.values()),
        max_monthly=(max_month, monthly[max_month]),
        min_monthly=(min_month, monthly[min_month]),
        per_player_counts=dict(per_player),
        per_player_mean=sum(counts) / len(counts),
        per_player_sd=_pop_sd(counts),
        per_player_range=(min(counts), max(counts)),
        overall_sale_rate=sold / len(records),
        monthly_sale_rate_sd=_pop_sd(monthly_rates) if monthly_rates else 0.0,
        per_player_month_sale_rate_mean=sum(pm_rates) / len(pm_rates),
        per_player_month_sale_rate_sd=_pop_sd(pm_rates),
    )


@dataclass(slots=True)
class ConcentrationReport:
    category_shares: list   # (category, share), descending
    item_shares: list
    top5_category_share: float
    top10_category_share: float
    top5_item_share: float
    top10_item_share: float


def concentration(records: list[AuctionRecord]) -> ConcentrationReport:
    if not records:
        raise ValueError("no records")
    n = len(records)
    cats = Counter(r.category for r in records)
    items = Counter(r.item_name for r in records)
    cat_shares = [(c, v / n) for c, v in cats.most_common()]
    item_shares = [(c, v / n) for c, v in items.most_common()]

    def topk(shares, k):
        return sum(s for _, s in shares[:k])

    return ConcentrationReport(cat_shares, item_shares,
                               topk(cat_shares, 5), topk(cat_shares, 10),
                               topk(item_shares, 5), topk(item_shares, 10))


@dataclass(slots=True)
class CohortMatrix:
    join_labels: list        # bin label per column
    cells: list              # cells[n-1][j] = players joined in bin j active in their n-th month
    row_totals: list
    row_percentages: list    # of the row-1 grand total


def cohort_matrix(binned: BinnedDataset) -> CohortMatrix:
    """Join month = first active bin; n-th-month activity = any activity in
    bin (join + n - 1). Gaps do not terminate a cohort row."""
    n_bins = binned.n_bins
    joined = {}
    active = [set(p) for p in binned.players_by_bin]
    for i, players in enumerate(active):
        for p in players:
            joined.setdefault(p, i)
    cells = [[0] * n_bins for _ in range(n_bins)]
    for p, j in joined.items():
        for n in range(1, n_bins - j + 1):
            if p in active[j + n - 1]:
                cells[n - 1][j] += 1
    row_totals = [sum(row) for row in cells]
    grand = row_totals[0] if row_totals and row_totals[0] else 1
    row_pct = [t / grand for t in row_totals]
    return CohortMatrix([b.label for b in binned.bins], cells, row_totals, row_pct)


@dataclass(slots=True)
class FeeLedger:
    listing_fees: list       # aligned with input record order
    commissions: list
    per_bin_totals: dict     # bin label -> total currants (listing + commission)


def operator_fees(records: list[AuctionRecord],
                  schedule=DEFAULT_FEE_SCHEDULE,
                  binned: Optional[BinnedDataset] = None) -> FeeLedger:
    """floor() fees in integer currants; rates chosen by created_at."""
    sched = sorted(schedule)
    listing = []
    commission = []
    for r in records:
        rate_l, rate_c = sched[0][1], sched[0][2]
        for eff, rl, rc in sched:
            if r.created_at >= eff:
                rate_l, rate_c = rl, rc
        listing.append(math.floor(rate_l * r.total_price))
        commission.append(math.floor(rate_c * r.total_price) if r.outcome == "SOLD" else 0)
    per_bin: dict = {}
    if binned is not None:
        fee_at = {r.record_id: listing[i] + commission[i] for i, r in enumerate(records)}
        for b, rs in zip(binned.bins, binned.records_by_bin):
            per_bin[b.label] = sum(fee_at[r.record_id] for r in rs)
    return FeeLedger(listing, commission, per_bin)


def participation_stats(kpis) -> tuple[float, float, float]:
    """(mean bins per participating player, population sd, single-bin share)."""
    per_player = Counter(k.player_id for k in kpis)
    counts = list(per_player.values())
    if not counts:
        raise ValueError("no KPI rows")
    mean = sum(counts) / len(counts)
    single = sum(1 for c in counts if c == 1) / len(counts)
    return mean, _pop_sd(counts), single
