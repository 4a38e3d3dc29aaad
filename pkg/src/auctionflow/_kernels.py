"""Lloyd-iteration kernels: numba-compiled hot path and a pure-numpy twin.

Both paths implement identical semantics and are interchangeable; selection
is via the AUCTIONFLOW_PURE_NUMPY environment variable (any non-empty value
forces the numpy path) or automatically when numba is unavailable.

Semantics shared by both paths:
  - assignment: argmin of squared Euclidean distance, ties -> lowest index
  - update: per-cluster mean
  - empty cluster repair: centroid <- the point currently farthest from its
    assigned centroid (ties -> lowest point index); repaired clusters claim
    distinct points within one update
  - convergence: assignments identical to the previous iteration
  - sse history: recorded after every assignment step
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap if not (args and callable(args[0])) else args[0]


def use_numba() -> bool:
    return HAVE_NUMBA and not os.environ.get("AUCTIONFLOW_PURE_NUMPY")


# ---------------------------------------------------------------------------
# pure-numpy path

def _assign_np(X, centroids):
    # (n, k) squared distances; argmin keeps the lowest index on ties
    d = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    assign = d.argmin(axis=1)
    sse = d[np.arange(len(X)), assign].sum()
    return assign, sse


def lloyd_numpy(X: np.ndarray, init_idx: np.ndarray, max_iter: int):
    n, p = X.shape
    k = len(init_idx)
    centroids = X[init_idx].copy()
    sse_hist = np.empty(max_iter + 1)
    assign, sse_hist[0] = _assign_np(X, centroids)
    converged = False
    n_iter = 0
    for h in range(1, max_iter + 1):
        counts = np.bincount(assign, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                centroids[c] = X[assign == c].mean(axis=0)
        empties = np.flatnonzero(counts == 0)
        if len(empties):
            own = ((X - centroids[assign]) ** 2).sum(axis=1)
            for c in empties:
                far = int(own.argmax())
                centroids[c] = X[far]
                own[far] = -1.0  # each repaired cluster claims a distinct point
        new_assign, sse = _assign_np(X, centroids)
        sse_hist[h] = sse
        n_iter = h
        if np.array_equal(new_assign, assign):
            converged = True
            break
        assign = new_assign
    return assign, centroids, sse_hist[: n_iter + 1], converged


# ---------------------------------------------------------------------------
# numba path (same semantics, explicit loops)

@njit(cache=True)
def _lloyd_nb(X, init_idx, max_iter):  # pragma: no cover - exercised via wrapper
    n, p = X.shape
    k = init_idx.shape[0]
    centroids = np.empty((k, p))
    for c in range(k):
        for j in range(p):
            centroids[c, j] = X[init_idx[c], j]
    assign = np.empty(n, dtype=np.int64)
    sse_hist = np.empty(max_iter + 1)
    sums = np.empty((k, p))
    counts = np.empty(k, dtype=np.int64)
    own = np.empty(n)

    # initial assignment
    sse = 0.0
    for i in range(n):
        best = -1
        best_d = np.inf
        for c in range(k):
            d = 0.0
            for j in range(p):
                diff = X[i, j] - centroids[c, j]
                d += diff * diff
            if d < best_d:
                best_d = d
                best = c
        assign[i] = best
        sse += best_d
    sse_hist[0] = sse

    converged = False
    n_iter = 0
    for h in range(1, max_iter + 1):
        sums[:] = 0.0
        counts[:] = 0
        for i in range(n):
            c = assign[i]
            counts[c] += 1
            for j in range(p):
                sums[c, j] += X[i, j]
        for c in range(k):
            if counts[c] > 0:
                for j in range(p):
                    centroids[c, j] = sums[c, j] / counts[c]
        # empty-cluster repair
        any_empty = False
        for c in range(k):
            if counts[c] == 0:
                any_empty = True
                break
        if any_empty:
            for i in range(n):
                d = 0.0
                for j in range(p):
                    diff = X[i, j] - centroids[assign[i], j]
                    d += diff * diff
                own[i] = d
            for c in range(k):
                if counts[c] == 0:
                    far = 0
                    far_d = -1.0
                    for i in range(n):
                        if own[i] > far_d:
                            far_d = own[i]
                            far = i
                    for j in range(p):
                        centroids[c, j] = X[far, j]
                    own[far] = -1.0

        # reassignment
        sse = 0.0
        changed = False
        for i in range(n):
            best = -1
            best_d = np.inf
            for c in range(k):
                d = 0.0
                for j in range(p):
                    diff = X[i, j] - centroids[c, j]
                    d += diff * diff
                if d < best_d:
                    best_d = d
                    best = c
            if best != assign[i]:
                changed = True
            assign[i] = best
            sse += best_d
        sse_hist[h] = sse
        n_iter = h
        if not changed:
            converged = True
            break
    return assign, centroids, sse_hist[: n_iter + 1], converged


def lloyd_numba(X, init_idx, max_iter):
    assign, centroids, hist, converged = _lloyd_nb(
        np.ascontiguousarray(X), np.ascontiguousarray(init_idx), max_iter)
    return assign, centroids, hist, converged


def lloyd(X: np.ndarray, init_idx: np.ndarray, max_iter: int):
    """Run one restart; dispatch to the compiled or pure-numpy kernel."""
    if use_numba():
        return lloyd_numba(X, init_idx, max_iter)
    return lloyd_numpy(X, init_idx, max_iter)
