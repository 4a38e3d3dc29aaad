"""Quintile standardization, multi-start K-means and W/B model selection."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels


@dataclass(slots=True)
class FeatureMatrix:
    values: np.ndarray            # (n, p) float64
    feature_names: tuple
    boolean_mask: tuple           # True where the column is boolean-derived
    standardized: bool = False
    row_ids: Optional[list] = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(slots=True)
class ClusterModel:
    k: int
    centroids: np.ndarray         # (k, p)
    assignments: np.ndarray       # (n,) int, values 0..k-1
    sse: float
    trace_w: float
    trace_b: float
    trace_t: float
    iterations: int
    converged: bool
    restarts_used: int
    best_restart: int
    seed: int
    sse_history: Optional[np.ndarray] = None

    def to_json(self) -> str:
        doc = {
            "k": self.k,
            "centroids": [[float(v) for v in row] for row in self.centroids],
            "assignments": [int(a) for a in self.assignments],
            "sse": self.sse,
            "trace_w": self.trace_w,
            "trace_b": self.trace_b,
            "trace_t": self.trace_t,
            "iterations": self.iterations,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "best_restart": self.best_restart,
            "seed": self.seed,
        }
        return json.dumps(doc, indent=2)


def quintile_boundaries(column: np.ndarray) -> np.ndarray:
    """Nearest-rank 20/40/60/80th percentile boundaries of a column."""
    s = np.sort(column)
    n = len(s)
    idx = [math.ceil(j * n / 5) - 1 for j in (1, 2, 3, 4)]
    return s[idx]


def quintile_standardize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Replace each column with quintile levels 1..5.

    Non-boolean columns: level = smallest q such that value <= q-th
    nearest-rank boundary, else 5. Boolean columns: false -> 1, true -> 5.
    """
    if matrix.standardized:
        raise ValueError("matrix already standardized")
    if matrix.n == 0:
        raise ValueError("cannot standardize an empty matrix")
    out = np.empty_like(matrix.values, dtype=np.float64)
    for j in range(matrix.p):
        col = matrix.values[:, j]
        if matrix.boolean_mask[j]:
            out[:, j] = np.where(col != 0, 5.0, 1.0)
        else:
            bounds = quintile_boundaries(col)
            levels = np.full(matrix.n, 5.0)
            for q in (4, 3, 2, 1):
                levels[col <= bounds[q - 1]] = float(q)
            out[:, j] = levels
    return FeatureMatrix(out, matrix.feature_names, matrix.boolean_mask,
                         standardized=True, row_ids=matrix.row_ids)


def scatter_decomposition(matrix: FeatureMatrix, centroids: np.ndarray,
                          assignments: np.ndarray) -> tuple[float, float, float]:
    """Traces of within, between and total scatter about the global mean."""
    X = matrix.values
    mu = X.mean(axis=0)
    assigned = centroids[assignments]
    trace_w = float(((X - assigned) ** 2).sum())
    trace_b = float(((assigned - mu) ** 2).sum())
    trace_t = float(((X - mu) ** 2).sum())
    return trace_w, trace_b, trace_t


def _restart_init(n: int, k: int, seed: int, restart: int) -> np.ndarray:
    rng = np.random.default_rng([seed, restart])
    return rng.choice(n, size=k, replace=False)


def kmeans(matrix: FeatureMatrix, k: int, restarts: int = 100, seed: int = 0,
           max_iter: int = 100, collect_history: bool = False) -> ClusterModel:
    """Multi-start Lloyd iteration; best restart by SSE, ties by restart index.

    Fully deterministic: restart r draws its initial centroids (k distinct
    rows) from a generator seeded with (seed, r), so results are independent
    of execution order.
    """
    n = matrix.n
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    X = np.ascontiguousarray(matrix.values, dtype=np.float64)

    best = None  # (sse, restart, assign, centroids, iters, converged, hist)
    for r in range(restarts):
        init = _restart_init(n, k, seed, r)
        assign, centroids, hist, converged = _kernels.lloyd(X, init, max_iter)
        if np.any(np.diff(hist) > 1e-9 * max(hist[0], 1.0)):
            raise AssertionError("SSE increased across Lloyd iterations")
        if len(np.unique(assign)) < k:
            continue  # empty cluster survived repair; restart invalid
        sse = float(hist[-1])
        if best is None or sse < best[0] - 1e-12:
            best = (sse, r, assign, centroids, len(hist) - 1, converged, hist)
    if best is None:
        raise ValueError(f"no restart produced {k} nonempty clusters")

    sse, r, assign, centroids, iters, converged, hist = best
    # final centroids are exact cluster means of the final assignment
    final = np.empty_like(centroids)
    for c in range(k):
        final[c] = X[assign == c].mean(axis=0)
    trace_w, trace_b, trace_t = scatter_decomposition(matrix, final, assign)
    model = ClusterModel(k, final, assign, trace_w, trace_w, trace_b, trace_t,
                         iters, converged, restarts, r, seed)
    if collect_history:
        model.sse_history = hist
    return model


@dataclass(slots=True)
class KSelectionReport:
    entries: list                 # dicts: {k, wb_ratio, converged}
    chosen_k: int
    threshold: float
    truncated: bool = False
    monotonicity_violations: list = field(default_factory=list)


def select_k(matrix: FeatureMatrix, k_range: Sequence[int] = range(2, 13),
             threshold: float = 0.3, restarts: int = 100, seed: int = 0,
             max_iter: int = 100) -> tuple[int, KSelectionReport, dict]:
    """Smallest k with W/B <= threshold, else the converged argmin of W/B.

    Returns (chosen_k, report, models_by_k). Non-convergent k values are
    flagged and excluded from selection.
    """
    ks = [k for k in k_range]
    truncated = False
    if matrix.n <= max(ks):
        ks = [k for k in ks if k <= matrix.n - 1] or [min(2, matrix.n)]
        truncated = True
    entries = []
    models = {}
    for k in ks:
        try:
            model = kmeans(matrix, k, restarts=restarts, seed=seed, max_iter=max_iter)
        except ValueError:
            entries.append({"k": k, "wb_ratio": None, "converged": False})
            continue
        if model.trace_b > 0:
            wb = model.trace_w / model.trace_b
        else:
            wb = 0.0 if model.trace_w == 0 else float("inf")
        models[k] = model
        entries.append({"k": k, "wb_ratio": wb, "converged": model.converged})

    usable = [e for e in entries if e["converged"] and e["wb_ratio"] is not None]
    if not usable:
        raise ValueError("no k converged")
    qualifying = [e for e in usable if e["wb_ratio"] <= threshold]
    if qualifying:
        chosen = min(e["k"] for e in qualifying)
    else:
        chosen = min(usable, key=lambda e: (e["wb_ratio"], e["k"]))["k"]

    violations = []
    for a, b in zip(usable, usable[1:]):
        if b["wb_ratio"] > a["wb_ratio"] + 1e-12:
            violations.append((a["k"], b["k"]))
    report = KSelectionReport(entries, chosen, threshold, truncated, violations)
    return chosen, report, models
