"""Command-line entry point.

Exit codes: 0 success, 1 data error, 2 configuration error (including a
missing upstream artifact for the requested stage).
"""

from __future__ import annotations

import argparse
import sys

from . import pipeline
from .config import PipelineConfig, load_config
from .ingest import ConfigurationError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auctionflow",
        description="Auction-house telemetry analytics: KPIs, per-month "
                    "clustering, migration flows, valuation, Sankey export.")
    parser.add_argument("subcommand",
                        choices=list(pipeline.STAGE_ORDER) + ["all"],
                        help="pipeline stage to run ('all' runs the full chain)")
    parser.add_argument("--config", required=True,
                        help="TOML config file (flat keys; see README)")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="clustering seed (overrides config)")
    parser.add_argument("--auctions", help="auctions CSV path (overrides config)")
    parser.add_argument("--forum", help="forum CSV path (overrides config)")
    parser.add_argument("--street-prices", help="street-price CSV path (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg.out_dir = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        if args.auctions:
            cfg.auctions_path = args.auctions
        if args.forum:
            cfg.forum_path = args.forum
        if args.street_prices:
            cfg.street_prices_path = args.street_prices
        cfg.validate()
    except (ConfigurationError, OSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.subcommand == "all":
            pipeline.run_all(cfg)
        else:
            pipeline.STAGES[args.subcommand](cfg)
    except pipeline.MissingArtifact as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
