import math

import pytest
from hypothesis import given, strategies as st

from auctionflow import valuation
from auctionflow.ingest import StreetPriceTable
from auctionflow.valuation import ItemPriceSeries, ValuationSignal
from conftest import rec, ts


def series(prices, start=None, step=86400, item="meat"):
    start = start if start is not None else ts(2012, 9, 9)
    return ItemPriceSeries(item, [(start + i * step, p) for i, p in enumerate(prices)])


def street(price, item="meat"):
    return StreetPriceTable(None, {item: price})


# ---------------------------------------------------------------------------
# success ratio / above-street

def test_success_ratio_hand_computation():
    # street 10 -> vendor value 7; sales {6, 7.1, 8} -> 2/3 strictly above
    assert valuation.success_ratio(series([6, 7.1, 8]), street(10)) == pytest.approx(2 / 3)


def test_success_ratio_boundary_strict():
    assert valuation.success_ratio(series([7.0, 7.0]), street(10)) == 0.0


def test_success_ratio_unpriced_item():
    with pytest.raises(ValuationSignal):
        valuation.success_ratio(series([5]), street(10, item="hooch"))


def test_success_ratio_empty_window():
    win = (ts(2013, 1, 1), ts(2013, 2, 1))
    with pytest.raises(ValuationSignal):
        valuation.success_ratio(series([5]), street(10), win)


def test_above_street_share_hand_computation():
    # street 10; sales {9, 11, 12, 10} -> 2/4 strictly above
    assert valuation.above_street_share(series([9, 11, 12, 10]), street(10)) == 0.5


def test_above_street_all_below():
    assert valuation.above_street_share(series([1, 2, 3]), street(10)) == 0.0


@given(st.lists(st.floats(0.1, 1e5), min_size=1, max_size=40),
       st.floats(0.1, 1e4))
def test_above_street_never_exceeds_success(prices, sp):
    s = series(prices)
    table = street(sp)
    assert (valuation.above_street_share(s, table)
            <= valuation.success_ratio(s, table))


@given(st.lists(st.floats(0.1, 1e4), min_size=1, max_size=30),
       st.floats(0.5, 100), st.floats(0.25, 8))
def test_scaling_invariance(prices, sp, scale):
    base = series(prices)
    table = street(sp)
    scaled = series([p * scale for p in prices])
    scaled_table = street(sp * scale)
    assert valuation.success_ratio(base, table) == pytest.approx(
        valuation.success_ratio(scaled, scaled_table))
    assert valuation.above_street_share(base, table) == pytest.approx(
        valuation.above_street_share(scaled, scaled_table))


# ---------------------------------------------------------------------------
# skewness

def skewness_oracle(values):
    """Direct adjusted Fisher-Pearson formula, computed independently."""
    n = len(values)
    mean = sum(values) / n
    s = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
    m3 = sum((v - mean) ** 3 for v in values) / n
    return (math.sqrt(n * (n - 1)) / (n - 2)) * m3 / (
        (sum((v - mean) ** 2 for v in values) / n) ** 1.5)


def test_skew_hooch_like_series():
    prices = [9.0] * 50 + [1_000_000.0]
    cls, g = valuation.classify_skew(series(prices))
    assert cls == "strong-right"
    assert g > 2


def test_skew_symmetric_zero():
    cls, g = valuation.classify_skew(series([1, 2, 3]))
    assert g == pytest.approx(0.0)
    assert cls == "none/left"


def test_skew_matches_independent_oracle():
    prices = [1, 1, 1, 1, 10]
    _, g = valuation.classify_skew(series(prices))
    assert g == pytest.approx(skewness_oracle(prices), rel=1e-9)


def test_skew_undefined_signals():
    with pytest.raises(ValuationSignal):
        valuation.classify_skew(series([1, 2]))
    with pytest.raises(ValuationSignal):
        valuation.classify_skew(series([4, 4, 4, 4]))


# ---------------------------------------------------------------------------
# trend

WEEK = 7 * 86400


def test_trend_constant_flat():
    cls, change = valuation.classify_trend(series([5, 5, 5, 5], step=WEEK))
    assert cls == "flat"
    assert change == pytest.approx(0.0)


def test_trend_depreciating_hand_computation():
    # weekly medians {10, 8, 6, 4}: slope -2, span 3, mean 7 -> -6/7
    cls, change = valuation.classify_trend(series([10, 8, 6, 4], step=WEEK))
    assert cls == "depreciated"
    assert round(change, 2) == -0.86


def ls_oracle(xs, ys):
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    return (sum((x - mx) * (y - my) for x, y in zip(xs, ys))
            / sum((x - mx) ** 2 for x in xs))


def test_trend_matches_regression_oracle():
    medians = [12, 9, 11, 5, 6]
    _, change = valuation.classify_trend(series(medians, step=WEEK))
    slope = ls_oracle(range(5), medians)
    assert change == pytest.approx(slope * 4 / (sum(medians) / 5), rel=1e-9)


def test_trend_single_granule_signals():
    with pytest.raises(ValuationSignal):
        # Tue..Thu of a single ISO week -> one weekly granule
        valuation.classify_trend(series([5, 6, 7], start=ts(2012, 9, 4)))


def test_trend_time_reversal_negates():
    prices = [10, 8, 6, 4]
    _, fwd = valuation.classify_trend(series(prices, step=WEEK))
    _, rev = valuation.classify_trend(series(list(reversed(prices)), step=WEEK))
    assert fwd == pytest.approx(-rev, abs=1e-9)


def test_volatility_summary_all_constant():
    all_series = {"a": series([5] * 4, step=WEEK), "b": series([9] * 4, step=WEEK)}
    lo = ts(2012, 9, 1)
    hi = ts(2012, 12, 31)
    out = valuation.volatility_summary(all_series, (lo, hi), (lo, hi))
    assert out["window_a"]["flat"] == 1.0
    assert out["window_b"]["flat"] == 1.0


def test_volatility_summary_planted_trends():
    all_series = {
        "up": series([10, 14, 18, 24], step=WEEK),
        "down": series([24, 18, 14, 10], step=WEEK),
        "steady": series([10, 10, 10, 10], step=WEEK),
    }
    lo, hi = ts(2012, 9, 1), ts(2012, 12, 31)
    out = valuation.volatility_summary(all_series, (lo, hi), (lo, hi))
    assert out["window_a"] == {"appreciated": pytest.approx(1 / 3),
                               "depreciated": pytest.approx(1 / 3),
                               "flat": pytest.approx(1 / 3)}


def test_build_price_series_sold_only_unit_price():
    records = [rec(item="meat", price=30, quantity=3, outcome="SOLD"),
               rec(item="meat", price=99, outcome="EXPIRED"),
               rec(item="hooch", price=8, outcome="SOLD")]
    out = valuation.build_price_series(records)
    assert [p for _, p in out["meat"].observations] == [10.0]
    assert set(out) == {"hooch", "meat"}


def test_valuation_reports_cover_signals():
    all_series = {"meat": series([6, 7.1, 8], step=WEEK),
                  "rare": series([5])}
    reports = valuation.valuation_reports(all_series, street(10))
    by_item = {r.item_name: r for r in reports}
    assert by_item["meat"].success_ratio == pytest.approx(2 / 3)
    assert by_item["rare"].street_price is None
    assert by_item["rare"].success_ratio is None
    assert by_item["rare"].skew_class is None  # < 3 observations
