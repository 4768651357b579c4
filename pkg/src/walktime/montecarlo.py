"""Seeded Monte Carlo estimates of hitting and cover times.

These are an empirical check on the exact solvers, not a substitute for them.
Sampling always runs in float64.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import kernels
from .errors import InvalidGraphError, StepCapExceeded
from .graph import WeightedGraph, validate

STEP_CAP = 10**9


@dataclasses.dataclass(frozen=True)
class WalkEstimate:
    mean: float
    stddev: float
    trials: int
    ci95: float
    seed: int

    def covers(self, exact, k: float = 3.0) -> bool:
        """True when ``exact`` lies within ``k`` 95% half-widths of the mean."""
        return abs(self.mean - float(exact)) <= k * self.ci95


def estimate(samples: np.ndarray, seed: int) -> WalkEstimate:
    """Summary statistics with order-independent (exactly rounded) sums."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    mean = math.fsum(x) / n
    var = math.fsum((x - mean) ** 2) / (n - 1) if n > 1 else 0.0
    sd = math.sqrt(var)
    return WalkEstimate(mean, sd, n, 1.96 * sd / math.sqrt(n), seed)


def walk_tables(g: WeightedGraph):
    """Padded per-vertex neighbour, cumulative-weight and weight arrays (0-based)."""
    validate(g)
    n = g.n
    maxdeg = max((g.degree(v) for v in range(1, n + 1)), default=0) or 1
    nbr = np.zeros((n, maxdeg), dtype=np.int64)
    cum = np.full((n, maxdeg), np.inf)
    wts = np.zeros((n, maxdeg))
    deg = np.zeros(n, dtype=np.int64)
    for v in range(1, n + 1):
        items = sorted(g.adjacency[v].items())
        d = len(items)
        deg[v - 1] = d
        if d:
            nbr[v - 1, :d] = [u - 1 for u, _ in items]
            wts[v - 1, :d] = [float(w) for _, w in items]
            cum[v - 1, :d] = np.cumsum(wts[v - 1, :d])
    total = np.array([cum[k, deg[k] - 1] if deg[k] else 0.0 for k in range(n)])
    return nbr, cum, wts, deg, total


def _check(g, trials, *vertices):
    validate(g)
    if trials < 1:
        raise InvalidGraphError("trials must be at least 1")
    for v in vertices:
        if not 1 <= v <= g.n:
            raise InvalidGraphError(f"vertex {v} out of range 1..{g.n}")


def simulate_hitting(g: WeightedGraph, i: int, j: int, trials: int, seed: int,
                     *, step_cap: int = STEP_CAP, impl=None) -> tuple[WalkEstimate, WalkEstimate]:
    """Estimate the step count and the traversed weight from ``i`` to ``j``."""
    _check(g, trials, i, j)
    if i == j:
        raise InvalidGraphError("start and target must differ")
    steps, wsum, ok = kernels.hitting_walks(walk_tables(g), i - 1, j - 1, trials, seed, step_cap, impl)
    if not ok:
        raise StepCapExceeded(f"a trial exceeded {step_cap} steps")
    return estimate(steps, seed), estimate(wsum, seed)


def simulate_cover(g: WeightedGraph, start: int, trials: int, seed: int,
                   *, step_cap: int = STEP_CAP, impl=None) -> WalkEstimate:
    """Estimate the number of steps needed to visit every vertex from ``start``."""
    _check(g, trials, start)
    steps, ok = kernels.cover_walks(walk_tables(g), start - 1, trials, seed, step_cap, impl)
    if not ok:
        raise StepCapExceeded(f"a trial exceeded {step_cap} steps")
    return estimate(steps, seed)
