"""Batch analytics for MMO auction-house telemetry.

Pipeline: ingest -> metrics -> clustering -> profiles -> flows / valuation
-> export (Sankey JSON + tabular reports), orchestrated by the CLI.
"""

__version__ = "0.1.0"
