"""Compare the numba kernel against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kmeans.py [n] [p] [k] [restarts]
"""

import sys
import time

import numpy as np

from auctionflow import _kernels
from auctionflow.clustering import FeatureMatrix, kmeans


def run(path_name, fn, X, k, restarts, seed):
    m = FeatureMatrix(X, tuple(f"f{i}" for i in range(X.shape[1])),
                      (False,) * X.shape[1], standardized=True)
    t0 = time.perf_counter()
    model = fn(m, k, restarts=restarts, seed=seed)
    dt = time.perf_counter() - t0
    print(f"{path_name:>12}: {dt:8.3f}s  sse={model.sse:.3f} "
          f"iters={model.iterations} restart={model.best_restart}")
    return model


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 8000
    p = int(sys.argv[2]) if len(sys.argv) > 2 else 5
    k = int(sys.argv[3]) if len(sys.argv) > 3 else 6
    restarts = int(sys.argv[4]) if len(sys.argv) > 4 else 100
    rng = np.random.default_rng(0)
    X = rng.integers(1, 6, size=(n, p)).astype(float)
    print(f"n={n} p={p} k={k} restarts={restarts}")

    import os
    # warm up the JIT so compile time is not measured
    _kernels.lloyd_numba(X[:50], np.arange(k), 5)

    os.environ.pop("AUCTIONFLOW_PURE_NUMPY", None)
    a = run("numba", kmeans, X, k, restarts, seed=1)
    os.environ["AUCTIONFLOW_PURE_NUMPY"] = "1"
    b = run("pure numpy", kmeans, X, k, restarts, seed=1)
    os.environ.pop("AUCTIONFLOW_PURE_NUMPY", None)
    assert a.sse == b.sse and np.array_equal(a.assignments, b.assignments), \
        "kernel paths disagree"
    print("paths agree bit-for-bit")


if __name__ == "__main__":
    main()
