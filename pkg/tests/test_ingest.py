import io

import pytest
from hypothesis import given, strategies as st

from auctionflow import ingest
from conftest import rec, ts

HEADER = ("record_id,player_id,created_at,expires_at,item_name,category,"
          "quantity,total_price,tool_uses,tool_capacity,outcome\n")


def auctions_csv(rows):
    return io.StringIO(HEADER + "".join(rows))


def row(player="p1", created=1325376000, outcome="sold", qty=1, price=10,
        item="meat", cat="food", expires=None):
    expires = expires if expires is not None else created + 259200
    return f",{player},{created},{expires},{item},{cat},{qty},{price},,,{outcome}\n"


def test_parse_basic_and_order():
    records, report = ingest.parse_auctions(auctions_csv([
        row(player="a", created=100), row(player="b", created=50)]))
    assert [r.player_id for r in records] == ["a", "b"]
    assert report.total == 0
    assert records[0].outcome == "SOLD"
    assert records[0].record_id == "1"  # synthesized ordinal


def test_empty_file_header_only():
    records, report = ingest.parse_auctions(auctions_csv([]))
    assert records == []
    assert report.total == 0


def test_missing_outcome_skipped():
    rows = [row() for _ in range(4)]
    rows.append(",p9,100,200,meat,food,1,10,,,\n")  # no outcome
    records, report = ingest.parse_auctions(auctions_csv(rows))
    assert len(records) == 4
    assert report.counts["missing_field"] == 1


def test_outcome_case_insensitive_and_bad_outcome():
    records, report = ingest.parse_auctions(auctions_csv(
        [row(outcome="SoLd"), row(outcome="gifted")]))
    assert len(records) == 1
    assert report.counts["bad_outcome"] == 1


def test_invariants_enforced():
    bad = [row(qty=0), row(price=-5), row(expires=10, created=100)]
    records, report = ingest.parse_auctions(auctions_csv(bad))
    assert records == []
    assert report.counts["bad_quantity"] == 1
    assert report.counts["negative_price"] == 1
    assert report.counts["expires_before_created"] == 1


def test_missing_required_column_fatal():
    stream = io.StringIO("player_id,created_at\np1,1\n")
    with pytest.raises(ingest.ConfigurationError):
        ingest.parse_auctions(stream)


def test_schema_map_rebinds_columns():
    stream = io.StringIO(
        "who,when,until,what,kind,n,cost,result\n"
        "p1,100,400,meat,food,2,30,sold\n")
    records, _ = ingest.parse_auctions(stream, schema_map={
        "player_id": "who", "created_at": "when", "expires_at": "until",
        "item_name": "what", "category": "kind", "quantity": "n",
        "total_price": "cost", "outcome": "result"})
    assert records[0].quantity == 2
    assert records[0].total_price == 30


def test_iso_timestamps_canonicalized():
    stream = io.StringIO(HEADER + ",p1,2012-01-01T00:00:00Z,2012-01-04T00:00:00Z,meat,food,1,10,,,sold\n")
    records, _ = ingest.parse_auctions(stream)
    assert records[0].created_at == ts(2012, 1, 1)


def test_round_trip_field_identical():
    records, _ = ingest.parse_auctions(auctions_csv(
        [row(player="a", created=100, qty=3, price=99),
         row(player="b", outcome="expired")]))
    buf = io.StringIO()
    ingest.records_to_csv(records, buf)
    buf.seek(0)
    again, report = ingest.parse_auctions(buf)
    assert report.total == 0
    assert again == records


# ---------------------------------------------------------------------------
# forum + street prices

def test_parse_forum_flag_column():
    stream = io.StringIO(
        "player_id,posted_at,comment_index,is_marketplace\n"
        "p1,100,c1,true\np2,200,c2,0\np1,300,c3,1\n")
    posts, report = ingest.parse_forum(stream)
    assert len(posts) == 3
    assert [p.is_marketplace for p in posts] == [True, False, True]
    assert report.total == 0


def test_parse_forum_allowlist():
    stream = io.StringIO("player_id,posted_at,comment_index\np1,100,c1\np2,200,c2\n")
    posts, _ = ingest.parse_forum(stream, marketplace_ids={"c2"})
    assert [p.is_marketplace for p in posts] == [False, True]


def test_parse_forum_corrupt_timestamp_counted():
    stream = io.StringIO("player_id,posted_at,comment_index\np1,notatime,c1\n")
    posts, report = ingest.parse_forum(stream)
    assert posts == []
    assert report.counts["unparseable_value"] == 1


def test_parse_forum_empty():
    posts, report = ingest.parse_forum(io.StringIO("player_id,posted_at,comment_index\n"))
    assert posts == []
    assert report.total == 0


def test_street_prices_singleton():
    table, report = ingest.parse_street_prices(io.StringIO("item_name,price\nmeat,12\n"))
    assert table.entries == {"meat": 12.0}
    assert report.total == 0


def test_street_prices_duplicates_last_wins():
    table, report = ingest.parse_street_prices(
        io.StringIO("item_name,price\nmeat,12\nmeat,15\n"))
    assert table.entries == {"meat": 15.0}
    assert report.counts["duplicate_item"] == 1


def test_street_prices_nonpositive_rejected():
    table, report = ingest.parse_street_prices(
        io.StringIO("item_name,price\nmeat,0\nhooch,-2\nmilk,3\n"))
    assert table.entries == {"milk": 3.0}
    assert report.counts["nonpositive_price"] == 2


# ---------------------------------------------------------------------------
# binning

def test_bin_records_monthly_span():
    records = [rec(created=ts(2011, 11, 20)), rec(created=ts(2012, 2, 3))]
    binned = ingest.bin_records(records, "month")
    assert [b.label for b in binned.bins] == ["2011-11", "2011-12", "2012-01", "2012-02"]
    assert [len(rs) for rs in binned.records_by_bin] == [1, 0, 0, 1]


def test_bin_records_single_day_one_bin():
    records = [rec(created=ts(2012, 3, 5, h)) for h in range(3)]
    binned = ingest.bin_records(records, "month")
    assert binned.n_bins == 1
    assert binned.players_by_bin[0] == {"p1"}


def test_bin_boundary_one_second():
    before = rec(player="a", created=ts(2012, 1, 31, 23, 59, 59))
    at_start = rec(player="b", created=ts(2012, 2, 1))
    binned = ingest.bin_records([before, at_start], "month")
    assert binned.n_bins == 2
    assert binned.players_by_bin[0] == {"a"}
    assert binned.players_by_bin[1] == {"b"}


def test_bin_records_empty_errors():
    with pytest.raises(ValueError):
        ingest.bin_records([], "month")


def test_players_by_bin_matches_records():
    records = [rec(player=p, created=ts(2012, 1, d)) for p in "ab" for d in (1, 15)]
    binned = ingest.bin_records(records, "month")
    for rs, players in zip(binned.records_by_bin, binned.players_by_bin):
        assert players == {r.player_id for r in rs}


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 60 * 86400 * 13)),
                min_size=1, max_size=200))
def test_partition_property(raw):
    base = ts(2011, 11, 17)
    records = [rec(player=f"p{p}", created=base + off) for p, off in raw]
    for granularity in ("month", "week", "day"):
        binned = ingest.bin_records(records, granularity)
        assert sum(len(rs) for rs in binned.records_by_bin) == len(records)
        # contiguous, non-overlapping, ascending
        for a, b in zip(binned.bins, binned.bins[1:]):
            assert a.end == b.start
        for b, rs in zip(binned.bins, binned.records_by_bin):
            for r in rs:
                assert b.start <= r.created_at < b.end
