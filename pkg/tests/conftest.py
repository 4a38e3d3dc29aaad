import datetime as dt
import os

import pytest

from auctionflow.ingest import UTC, AuctionRecord


def ts(year, month, day, hour=0, minute=0, second=0):
    return int(dt.datetime(year, month, day, hour, minute, second, tzinfo=UTC).timestamp())


def rec(player="p1", created=None, item="meat", category="food", quantity=1,
        price=100, outcome="SOLD", rid=None, expires=None):
    created = created if created is not None else ts(2012, 1, 1)
    return AuctionRecord(rid or f"r{created}-{player}", player, created,
                         expires if expires is not None else created + 3 * 86400,
                         item, category, quantity, price, None, None, outcome)


@pytest.fixture
def make_record():
    return rec


def glitch_data_dir():
    """Directory with the public auction-house dump, if provided.

    Expected files: auctions.csv, forum.csv (optional), street_prices.csv
    (optional). Dataset-dependent checks skip when unset.
    """
    path = os.environ.get("GLITCH_DATA_DIR", "")
    return path if path and os.path.isdir(path) else None


requires_dataset = pytest.mark.skipif(
    glitch_data_dir() is None,
    reason="public auction dump not available (set GLITCH_DATA_DIR)")
