"""Time the numba kernels against the numpy fallbacks.

    python benchmarks/bench_kernels.py [--trials N] [--repeat R]

The first numba call per kernel compiles (or loads the on-disk cache) and is
reported separately from the steady-state timings.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from walktime import kernels
from walktime.graph import WeightedGraph, read_graph
from walktime.montecarlo import walk_tables

DATA = Path(__file__).resolve().parent.parent / "data"


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(trials):
    g8 = walk_tables(read_graph(DATA / "graph8.wg"))
    g4 = walk_tables(read_graph(DATA / "graph4.wg"))
    ring = walk_tables(WeightedGraph.from_edges(12, [(i, i % 12 + 1) for i in range(1, 13)]))
    rng = np.random.default_rng(1)
    cost = rng.uniform(1, 10, size=(14, 14))
    return [
        (f"hitting G8 1->2, {trials} walks",
         lambda impl: kernels.hitting_walks(g8, 0, 1, trials, 7, 10**9, impl)),
        (f"cover G4 from 1, {trials} walks",
         lambda impl: kernels.cover_walks(g4, 0, trials, 7, 10**9, impl)),
        (f"cover 12-cycle, {trials // 10} walks",
         lambda impl: kernels.cover_walks(ring, 0, trials // 10, 7, 10**9, impl)),
        ("Held-Karp, 14 vertices",
         lambda impl: kernels.held_karp(cost, impl)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'case':38s} {'numba first':>12s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, run in cases(args.trials):
        t0 = time.perf_counter()
        run("numba")
        first = time.perf_counter() - t0
        nb = best_of(lambda: run("numba"), args.repeat)
        npy = best_of(lambda: run("numpy"), args.repeat)
        print(f"{name:38s} {first:11.3f}s {nb:9.3f}s {npy:9.3f}s {npy / nb:7.1f}x")


if __name__ == "__main__":
    main()
