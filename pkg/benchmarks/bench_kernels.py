"""Benchmark the compiled BFS kernel against the pure numpy fallback.

Builds one sizeable tiling, extracts its CSR adjacency, and times
single-source BFS sweeps with both implementations.

    python3 benchmarks/bench_kernels.py [--epsilon 2e-4] [--depth-cap 14]
"""
import argparse
import time

import numpy as np

from lqgtiles import AdjacencyGraph, DyadicSquare, OctaveField, params_from_q, subdivide
from lqgtiles.kernels import _pykernels, backend

try:
    from lqgtiles.kernels import _ckernels
except ImportError:
    _ckernels = None


def build_graph(epsilon, depth_cap, seed):
    window = DyadicSquare(0, 0, 0)
    field = OctaveField(window, depth=depth_cap + 1, seed=seed)
    t = subdivide(window, epsilon, field, params_from_q(2.0), depth_cap)
    g = AdjacencyGraph(t)
    n = len(g.indptr) - 1
    print(f"tiling: {len(t)} squares + {t.n_unresolved} unresolved, "
          f"{len(g.indices) // 2} edges")
    return g, n


def time_impl(fn, indptr, indices, sources, blocked, sweeps):
    # warm-up
    fn(indptr, indices, sources[:1], blocked)
    t0 = time.perf_counter()
    for s in sources[:sweeps]:
        fn(indptr, indices, np.array([s], dtype=np.int64), blocked)
    return (time.perf_counter() - t0) / sweeps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--epsilon", type=float, default=2.0 ** -12)
    ap.add_argument("--depth-cap", type=int, default=14)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--sweeps", type=int, default=10)
    ns = ap.parse_args()

    g, n = build_graph(ns.epsilon, ns.depth_cap, ns.seed)
    blocked = g.blocked
    rng = np.random.default_rng(0)
    open_nodes = np.flatnonzero(~blocked)
    sources = rng.choice(open_nodes, size=min(ns.sweeps, len(open_nodes)),
                         replace=False).astype(np.int64)

    print(f"selected backend: {backend}")
    t_py = time_impl(_pykernels.bfs_distances, g.indptr, g.indices,
                     sources, blocked, ns.sweeps)
    print(f"pure python/numpy BFS: {t_py * 1e3:9.2f} ms/sweep")
    if _ckernels is not None:
        t_c = time_impl(_ckernels.bfs_distances, g.indptr, g.indices,
                        sources, blocked, ns.sweeps)
        print(f"compiled BFS:          {t_c * 1e3:9.2f} ms/sweep")
        print(f"speedup:               {t_py / t_c:9.1f}x")
    else:
        print("compiled kernel unavailable; only the fallback was timed")


if __name__ == "__main__":
    main()
