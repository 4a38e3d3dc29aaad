"""Pipeline configuration: flat key-value TOML file plus flag overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .ingest import ConfigurationError
from .metrics import DEFAULT_FEE_SCHEDULE


@dataclass(slots=True)
class PipelineConfig:
    # inputs
    auctions_path: str = ""
    forum_path: str = ""
    street_prices_path: str = ""
    delimiter: str = ","
    schema_map: dict = field(default_factory=dict)
    marketplace_ids_path: str = ""

    # binning
    granularity: str = "month"

    # clustering
    k_min: int = 2
    k_max: int = 12
    wb_threshold: float = 0.3
    restarts: int = 100
    max_iter: int = 100
    seed: int = -1              # mandatory: no wall-clock default

    # labeling thresholds
    activity_low: float = 2.0
    activity_high: float = 4.0
    forum_cut: float = 3.0
    winner_quintile: float = 4.0
    loser_quintile: float = 2.0
    casual_winner_rate: float = 1.0
    casual_loser_rate: float = 0.5

    # fees: list of [effective_epoch, listing_rate, commission_rate]
    fee_schedule: list = field(default_factory=lambda: [list(t) for t in DEFAULT_FEE_SCHEDULE])

    # valuation
    skew_strong_cut: float = 2.0
    trend_change_cut: float = 0.10
    valuation_window_months: int = 4
    volatility_window_weeks: int = 4

    out_dir: str = "out"

    def validate(self) -> None:
        if self.seed < 0:
            raise ConfigurationError("seed is mandatory and must be >= 0")
        if self.granularity not in ("month", "week", "day"):
            raise ConfigurationError(f"bad granularity {self.granularity!r}")
        if not (1 <= self.k_min <= self.k_max):
            raise ConfigurationError("need 1 <= k_min <= k_max")
        if self.wb_threshold < 0:
            raise ConfigurationError("wb_threshold must be >= 0")
        if self.restarts < 1 or self.max_iter < 1:
            raise ConfigurationError("restarts and max_iter must be >= 1")
        if not self.auctions_path:
            raise ConfigurationError("auctions_path is required")


_FIELDS = {f.name for f in dataclasses.fields(PipelineConfig)}


def load_config(path: str) -> PipelineConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - _FIELDS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(**raw)
