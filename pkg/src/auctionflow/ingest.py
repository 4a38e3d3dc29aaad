"""Parsing of auction, forum and street-price files, and calendar binning.

All parsers take an open text stream with a header row. Malformed rows are
skipped and counted in an IssueReport, never repaired: the source telemetry
is known to have gaps, so downstream code must tolerate loss anyway.
"""

from __future__ import annotations

import csv
import datetime as dt
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

UTC = dt.timezone.utc

OUTCOMES = ("SOLD", "EXPIRED", "DELETED")

#: canonical column names; a schema_map overrides any subset of these
DEFAULT_AUCTION_COLUMNS = {
    "record_id": "record_id",
    "player_id": "player_id",
    "created_at": "created_at",
    "expires_at": "expires_at",
    "item_name": "item_name",
    "category": "category",
    "quantity": "quantity",
    "total_price": "total_price",
    "tool_uses": "tool_uses",
    "tool_capacity": "tool_capacity",
    "outcome": "outcome",
}

REQUIRED_AUCTION_FIELDS = (
    "player_id", "created_at", "expires_at", "item_name",
    "category", "quantity", "total_price", "outcome",
)

OPTIONAL_AUCTION_FIELDS = ("record_id", "tool_uses", "tool_capacity")


class ConfigurationError(Exception):
    """A required column is missing from the header, or config is unusable."""


@dataclass(frozen=True, slots=True)
class AuctionRecord:
    record_id: str
    player_id: str
    created_at: int          # UTC epoch seconds
    expires_at: int
    item_name: str
    category: str
    quantity: int
    total_price: int
    tool_uses: Optional[int]
    tool_capacity: Optional[int]
    outcome: str             # SOLD | EXPIRED | DELETED


@dataclass(frozen=True, slots=True)
class ForumPost:
    player_id: str
    posted_at: int
    comment_index: str
    is_marketplace: bool


@dataclass(frozen=True, slots=True)
class StreetPriceTable:
    snapshot_date: Optional[str]
    entries: dict  # item_name -> price (currants per unit, > 0)


@dataclass
class IssueReport:
    """Counts of skipped rows, keyed by reason."""

    counts: Counter = field(default_factory=Counter)

    def add(self, reason: str) -> None:
        self.counts[reason] += 1

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def summary(self) -> str:
        if not self.counts:
            return "no issues"
        parts = [f"{reason}: {n}" for reason, n in sorted(self.counts.items())]
        return f"{self.total} rows skipped ({', '.join(parts)})"


def parse_timestamp(raw: str) -> int:
    """Accept integer epoch seconds or ISO-8601; canonicalize to UTC epoch."""
    raw = raw.strip()
    if not raw:
        raise ValueError("empty timestamp")
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return int(float(raw))
    except ValueError:
        pass
    text = raw.replace("Z", "+00:00")
    parsed = dt.datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=UTC)
    return int(parsed.timestamp())


def _column_indices(header, schema_map):
    columns = dict(DEFAULT_AUCTION_COLUMNS)
    if schema_map:
        columns.update(schema_map)
    position = {name: i for i, name in enumerate(header)}
    idx = {}
    for fld in REQUIRED_AUCTION_FIELDS:
        col = columns[fld]
        if col not in position:
            raise ConfigurationError(f"required column {col!r} (field {fld}) not in header")
        idx[fld] = position[col]
    for fld in OPTIONAL_AUCTION_FIELDS:
        col = columns.get(fld)
        idx[fld] = position.get(col) if col else None
    return idx


def parse_auctions(stream: TextIO, schema_map: Optional[dict] = None,
                   delimiter: str = ",") -> tuple[list[AuctionRecord], IssueReport]:
    """Parse a delimited auctions file into validated records, input order."""
    reader = csv.reader(stream, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigurationError("input has no header row")
    idx = _column_indices(header, schema_map)
    report = IssueReport()
    records = []
    ordinal = 0
    i_rid, i_uses, i_cap = idx["record_id"], idx["tool_uses"], idx["tool_capacity"]

    for row in reader:
        ordinal += 1
        try:
            player_id = row[idx["player_id"]].strip()
            outcome = row[idx["outcome"]].strip().upper()
            if not player_id or not row[idx["outcome"]].strip():
                report.add("missing_field")
                continue
            if outcome not in OUTCOMES:
                report.add("bad_outcome")
                continue
            created = parse_timestamp(row[idx["created_at"]])
            expires = parse_timestamp(row[idx["expires_at"]])
            if expires < created:
                report.add("expires_before_created")
                continue
            quantity = int(row[idx["quantity"]])
            price = int(float(row[idx["total_price"]]))
            if quantity < 1:
                report.add("bad_quantity")
                continue
            if price < 0:
                report.add("negative_price")
                continue
            uses = cap = None
            if i_uses is not None and i_uses < len(row) and row[i_uses].strip():
                uses = int(row[i_uses])
            if i_cap is not None and i_cap < len(row) and row[i_cap].strip():
                cap = int(row[i_cap])
            rid = row[i_rid].strip() if i_rid is not None and i_rid < len(row) and row[i_rid].strip() else str(ordinal)
            records.append(AuctionRecord(
                rid, player_id, created, expires,
                row[idx["item_name"]].strip(), row[idx["category"]].strip(),
                quantity, price, uses, cap, outcome))
        except IndexError:
            report.add("short_row")
        except ValueError:
            report.add("unparseable_value")
    return records, report


def parse_forum(stream: TextIO, marketplace_ids: Optional[set] = None,
                delimiter: str = ",") -> tuple[list[ForumPost], IssueReport]:
    """Parse forum posts.

    is_marketplace comes from a `is_marketplace` flag column when present,
    otherwise from membership of comment_index in the marketplace_ids
    allowlist (empty/None allowlist means nothing is flagged).
    """
    reader = csv.reader(stream, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigurationError("input has no header row")
    pos = {name: i for i, name in enumerate(header)}
    for col in ("player_id", "posted_at", "comment_index"):
        if col not in pos:
            raise ConfigurationError(f"required column {col!r} not in header")
    flag_col = pos.get("is_marketplace")
    report = IssueReport()
    posts = []
    for row in reader:
        try:
            player = row[pos["player_id"]].strip()
            if not player:
                report.add("missing_field")
                continue
            ts = parse_timestamp(row[pos["posted_at"]])
            comment = row[pos["comment_index"]].strip()
            if flag_col is not None:
                flag = row[flag_col].strip().lower() in ("1", "true", "yes")
            else:
                flag = bool(marketplace_ids) and comment in marketplace_ids
            posts.append(ForumPost(player, ts, comment, flag))
        except IndexError:
            report.add("short_row")
        except ValueError:
            report.add("unparseable_value")
    return posts, report


def parse_street_prices(stream: TextIO, snapshot_date: Optional[str] = None,
                        delimiter: str = ",") -> tuple[StreetPriceTable, IssueReport]:
    """Two-column item_name,price table. Duplicates: last wins, counted."""
    reader = csv.reader(stream, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ConfigurationError("input has no header row")
    pos = {name: i for i, name in enumerate(header)}
    i_item = pos.get("item_name", 0)
    i_price = pos.get("price", 1)
    report = IssueReport()
    entries: dict = {}
    for row in reader:
        try:
            item = row[i_item].strip()
            price = float(row[i_price])
        except (IndexError, ValueError):
            report.add("unparseable_value")
            continue
        if not item:
            report.add("missing_field")
            continue
        if price <= 0:
            report.add("nonpositive_price")
            continue
        if item in entries:
            report.add("duplicate_item")
        entries[item] = price
    return StreetPriceTable(snapshot_date, entries), report


# ---------------------------------------------------------------------------
# calendar binning

@dataclass(frozen=True, slots=True)
class Bin:
    index: int
    label: str       # e.g. "2011-11" / "2011-W46" / "2011-11-17"
    start: int       # UTC epoch seconds, inclusive
    end: int         # exclusive


@dataclass(slots=True)
class BinnedDataset:
    bins: list
    records_by_bin: list
    players_by_bin: list

    @property
    def n_bins(self) -> int:
        return len(self.bins)


def _month_floor(d: dt.datetime) -> dt.datetime:
    return d.replace(day=1, hour=0, minute=0, second=0, microsecond=0)


def _next_month(d: dt.datetime) -> dt.datetime:
    if d.month == 12:
        return d.replace(year=d.year + 1, month=1)
    return d.replace(month=d.month + 1)


def _bin_edges(start_ts: int, end_ts: int, granularity: str):
    """Yield (label, start_epoch, end_epoch) covering [start_ts, end_ts]."""
    first = dt.datetime.fromtimestamp(start_ts, UTC)
    last = dt.datetime.fromtimestamp(end_ts, UTC)
    if granularity == "month":
        cur = _month_floor(first)
        while cur <= last:
            nxt = _next_month(cur)
            yield cur.strftime("%Y-%m"), int(cur.timestamp()), int(nxt.timestamp())
            cur = nxt
    elif granularity == "week":
        # ISO weeks, Monday start
        cur = (first - dt.timedelta(days=first.weekday())).replace(
            hour=0, minute=0, second=0, microsecond=0)
        while cur <= last:
            nxt = cur + dt.timedelta(days=7)
            iso = cur.isocalendar()
            yield f"{iso[0]}-W{iso[1]:02d}", int(cur.timestamp()), int(nxt.timestamp())
            cur = nxt
    elif granularity == "day":
        cur = first.replace(hour=0, minute=0, second=0, microsecond=0)
        while cur <= last:
            nxt = cur + dt.timedelta(days=1)
            yield cur.strftime("%Y-%m-%d"), int(cur.timestamp()), int(nxt.timestamp())
            cur = nxt
    else:
        raise ValueError(f"unknown granularity {granularity!r}")


def bin_records(records: Iterable[AuctionRecord], granularity: str = "month") -> BinnedDataset:
    """Partition records into contiguous UTC calendar bins by created_at."""
    records = list(records)
    if not records:
        raise ValueError("nothing to bin: empty record list")
    lo = min(r.created_at for r in records)
    hi = max(r.created_at for r in records)
    bins = [Bin(i, label, s, e)
            for i, (label, s, e) in enumerate(_bin_edges(lo, hi, granularity))]
    starts = [b.start for b in bins]
    records_by_bin: list = [[] for _ in bins]
    import bisect
    for r in records:
        i = bisect.bisect_right(starts, r.created_at) - 1
        records_by_bin[i].append(r)
    players_by_bin = [{r.player_id for r in rs} for rs in records_by_bin]
    return BinnedDataset(bins, records_by_bin, players_by_bin)


def records_to_csv(records: Iterable[AuctionRecord], stream: TextIO) -> None:
    """Serialize records in the canonical column order (round-trip safe)."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["record_id", "player_id", "created_at", "expires_at", "item_name",
                "category", "quantity", "total_price", "tool_uses", "tool_capacity",
                "outcome"])
    for r in records:
        w.writerow([r.record_id, r.player_id, r.created_at, r.expires_at,
                    r.item_name, r.category, r.quantity, r.total_price,
                    "" if r.tool_uses is None else r.tool_uses,
                    "" if r.tool_capacity is None else r.tool_capacity,
                    r.outcome])
