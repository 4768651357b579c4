"""Exact cover times.

A walk's progress is tracked by the state ``(P, i)``: ``P`` is the set of
vertices already visited (a bitmask, bit ``v-1`` for vertex ``v``) and ``i``
the current position.  All states with ``P = V`` are lumped into one
absorbing state, and the cover time from ``s`` is the expected absorption
time from ``({s}, s)``.

Two solvers are provided.  :func:`cover_time_naive` solves the absorbing
system over every reachable state at once.  :func:`cover_time_decomposed`
exploits that the walk only ever grows ``P``: for each visited set it solves
one ``|P| x |P|`` system for the time spent inside ``P`` and the distribution
of the first vertex discovered outside it, then combines the sets from the
largest down.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import os
from collections import deque
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import InvalidGraphError, NotUnweighted, StateLimitExceeded
from .graph import WeightedGraph, validate
from .hitting import hitting_times_steps
from .numerics import get_backend, solve_linear, solve_sparse_rows
from .resistance import conductance_matrix, resistance_matrix

DEFAULT_STATE_CAP = 2_000_000


def default_state_cap() -> int:
    env = os.environ.get("WALKTIME_STATE_CAP")
    if env:
        cap = int(env)
        if cap <= 0:
            raise ValueError("WALKTIME_STATE_CAP must be positive")
        return cap
    return DEFAULT_STATE_CAP


def vertices_of(mask: int) -> tuple[int, ...]:
    return tuple(v + 1 for v in range(mask.bit_length()) if mask >> v & 1)


def mask_of(vertices) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << (v - 1)
    return mask


class CoverState(NamedTuple):
    mask: int
    position: int

    @property
    def visited(self) -> tuple[int, ...]:
        return vertices_of(self.mask)


@dataclasses.dataclass
class AssociatedGraph:
    start: int
    full_mask: int
    states: list[CoverState]  # non-absorbing, ordered by (|P|, P, position)
    index: dict[CoverState, int]
    # transitions[k] = [(target index or ABSORBED, probability), ...]
    transitions: list[list[tuple[int, Fraction]]]

    ABSORBED = -1

    def __len__(self):
        return len(self.states)


@dataclasses.dataclass
class CoverComputation:
    start: int
    state_values: dict[CoverState, object]
    cover_time: object
    method: str
    states_explored: int
    full_mask: int = 0

    def value(self, state: CoverState):
        if state.mask == self.full_mask:
            return type(self.cover_time)(0)
        return self.state_values[state]


def _check_start(g: WeightedGraph, start: int):
    validate(g)
    if not 1 <= start <= g.n:
        raise InvalidGraphError(f"start vertex {start} out of range 1..{g.n}")
    if g.n > 62:
        raise InvalidGraphError("cover computations support at most 62 vertices")


def build_associated_graph(g: WeightedGraph, start: int, cap: int | None = None) -> AssociatedGraph:
    """Breadth-first construction of the states reachable from ``({start}, start)``."""
    _check_start(g, start)
    cap = default_state_cap() if cap is None else cap
    full = (1 << g.n) - 1
    origin = CoverState(1 << (start - 1), start)
    probs = {i: [(j, w / g.strength(i)) for j, w in sorted(g.adjacency[i].items())]
             for i in range(1, g.n + 1)}
    seen = {origin} if origin.mask != full else set()
    queue = deque(seen)
    edges: dict[CoverState, list[tuple[CoverState | None, Fraction]]] = {}
    while queue:
        x = queue.popleft()
        out = []
        for j, p in probs[x.position]:
            y = CoverState(x.mask | 1 << (j - 1), j)
            if y.mask == full:
                out.append((None, p))
                continue
            out.append((y, p))
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise StateLimitExceeded(f"more than {cap} reachable states")
                queue.append(y)
        edges[x] = out
    states = sorted(seen, key=lambda s: (bin(s.mask).count("1"), s.mask, s.position))
    index = {s: k for k, s in enumerate(states)}
    transitions = []
    for s in states:
        row: dict[int, Fraction] = {}
        for y, p in edges[s]:
            k = AssociatedGraph.ABSORBED if y is None else index[y]
            row[k] = row.get(k, Fraction(0)) + p
        transitions.append(sorted(row.items()))
    return AssociatedGraph(start, full, states, index, transitions)


def cover_time_naive(g: WeightedGraph, start: int, backend=None, cap: int | None = None) -> CoverComputation:
    """Cover time from one absorbing-chain solve over the whole state graph."""
    backend = get_backend(backend)
    ag = build_associated_graph(g, start, cap)
    full = ag.full_mask
    if not ag.states:
        zero = backend.scalar(0)
        return CoverComputation(start, {}, zero, "naive", 0, full)
    rows = []
    for k, trans in enumerate(ag.transitions):
        row = {k: backend.scalar(1)}
        for t, p in trans:
            if t != AssociatedGraph.ABSORBED:
                row[t] = row.get(t, 0) - backend.scalar(p)
        rows.append(row)
    h = solve_sparse_rows(rows, [backend.scalar(1)] * len(rows), backend)
    values = {s: backend.scalar(h[k]) for k, s in enumerate(ag.states)}
    origin = CoverState(1 << (start - 1), start)
    return CoverComputation(start, values, values[origin], "naive", len(ag.states), full)


@dataclasses.dataclass(frozen=True)
class ExitStatistics:
    subset: tuple[int, ...]
    stay_times: dict[int, object]  # i -> expected steps inside P before the exiting step
    exit_probs: dict[tuple[int, int], object]  # (i, j) -> P(first vertex outside P is j)
    exit_times: dict[int, object] = dataclasses.field(default_factory=dict)  # stay + 1


def _exit_solve(W: np.ndarray, strength: np.ndarray, inside: list[int], outside: list[int], backend):
    """Absorption times and first-exit distributions for a walk confined to ``inside``.

    Indices are 0-based.  Returns ``(times, probs)`` with ``times[a]`` for
    ``inside[a]`` and ``probs[a, b]`` for exiting to ``outside[b]``.
    """
    A = -W[np.ix_(inside, inside)]
    for a, v in enumerate(inside):
        A[a, a] = strength[v]
    rhs = backend.zeros((len(inside), 1 + len(outside)))
    rhs[:, 0] = strength[inside]
    if outside:
        rhs[:, 1:] = W[np.ix_(inside, outside)]
    X = solve_linear(A, rhs, backend)
    return X[:, 0], X[:, 1:]


def exit_statistics(g: WeightedGraph, subset, backend=None) -> ExitStatistics:
    """Time spent inside ``subset`` and where the walk first leaves it, per start."""
    backend = get_backend(backend)
    validate(g)
    P = sorted(set(subset))
    if not P or len(P) == g.n:
        raise InvalidGraphError("subset must be non-empty and proper")
    for v in P:
        if not 1 <= v <= g.n:
            raise InvalidGraphError(f"vertex {v} out of range 1..{g.n}")
    W = conductance_matrix(g, backend)
    strength = W.sum(axis=1)
    inside = [v - 1 for v in P]
    outside = sorted({u - 1 for v in P for u in g.adjacency[v] if u not in set(P)})
    times, probs = _exit_solve(W, strength, inside, outside, backend)
    one = backend.scalar(1)
    stay = {v: times[a] - one for a, v in enumerate(P)}
    exits = {(v, u + 1): probs[a, b] for a, v in enumerate(P) for b, u in enumerate(outside)}
    return ExitStatistics(tuple(P), stay, exits, {v: times[a] for a, v in enumerate(P)})


def reachable_subsets(g: WeightedGraph, start: int) -> list[int]:
    """Masks of connected vertex sets containing ``start``, excluding the full set."""
    full = (1 << g.n) - 1
    nbr_mask = [0] * (g.n + 1)
    for u, v, _ in g.edges:
        nbr_mask[u] |= 1 << (v - 1)
        nbr_mask[v] |= 1 << (u - 1)
    first = 1 << (start - 1)
    seen = {first}
    queue = deque([first])
    while queue:
        mask = queue.popleft()
        frontier = 0
        for v in vertices_of(mask):
            frontier |= nbr_mask[v]
        frontier &= ~mask
        while frontier:
            bit = frontier & -frontier
            frontier ^= bit
            nxt = mask | bit
            if nxt != full and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    seen.discard(full)
    return sorted(seen)


def cover_time_decomposed(g: WeightedGraph, start: int, backend=None, cap: int | None = None) -> CoverComputation:
    """Cover time by combining per-subset exit statistics, largest subsets first."""
    backend = get_backend(backend)
    _check_start(g, start)
    cap = default_state_cap() if cap is None else cap
    full = (1 << g.n) - 1
    if g.n == 1:
        return CoverComputation(start, {}, backend.scalar(0), "decomposed", 0, full)
    masks = reachable_subsets(g, start)
    pairs = sum(bin(m).count("1") for m in masks)
    if pairs > cap:
        raise StateLimitExceeded(f"{pairs} (subset, position) pairs exceed the cap of {cap}")
    nbr_mask = [0] * g.n
    for u, v, _ in g.edges:
        nbr_mask[u - 1] |= 1 << (v - 1)
        nbr_mask[v - 1] |= 1 << (u - 1)
    frontier = {}
    for mask in masks:
        f = 0
        for v in vertices_of(mask):
            f |= nbr_mask[v - 1]
        frontier[mask] = f & ~mask
    W = conductance_matrix(g, backend)
    strength = W.sum(axis=1)
    zero = backend.scalar(0)
    values: dict[CoverState, object] = {}
    for mask in sorted(masks, key=lambda m: -bin(m).count("1")):
        inside = [v - 1 for v in vertices_of(mask)]
        outside = [u for u in range(g.n) if not mask >> u & 1 and frontier[mask] >> u & 1]
        times, probs = _exit_solve(W, strength, inside, outside, backend)
        after = [zero if (mask | 1 << u) == full else values[CoverState(mask | 1 << u, u + 1)]
                 for u in outside]
        after = backend.array(after) if backend.exact else np.array(after, dtype=float)
        h = times + probs @ after
        for a, v in enumerate(inside):
            values[CoverState(mask, v + 1)] = h[a]
    origin = CoverState(1 << (start - 1), start)
    return CoverComputation(start, values, values[origin], "decomposed", len(values), full)


def cover_time(g: WeightedGraph, start: int, method: str = "decomposed", backend=None, cap=None) -> CoverComputation:
    if method == "naive":
        return cover_time_naive(g, start, backend, cap)
    if method == "decomposed":
        return cover_time_decomposed(g, start, backend, cap)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# cyclic cover time
# ---------------------------------------------------------------------------

class CyclicCover(NamedTuple):
    value: object
    cycle: tuple[int, ...]


def _cycle_cost(H, cycle) -> object:
    return sum((H[a - 1, b - 1] for a, b in zip(cycle, cycle[1:] + cycle[:1])), type(H[0, 0])(0))


def _held_karp_exact(H) -> list[dict[int, Fraction]]:
    n = H.shape[0]
    full = (1 << n) - 1
    # togo[mask][j]: cheapest way to finish from j having visited mask (always contains vertex 0)
    togo: dict[int, dict[int, Fraction]] = {full: {j: H[j, 0] for j in range(1, n)}}
    for size in range(n - 1, 0, -1):
        for rest in itertools.combinations(range(1, n), size - 1):
            mask = 1 | sum(1 << r for r in rest)
            ends = rest if rest else (0,)
            row = {}
            for j in ends:
                best = None
                for k in range(1, n):
                    if mask >> k & 1:
                        continue
                    c = H[j, k] + togo[mask | 1 << k][k]
                    if best is None or c < best:
                        best = c
                row[j] = best
            togo[mask] = row
    return togo


def _reconstruct(H, lookup, best, tol) -> tuple[int, ...]:
    n = H.shape[0]
    mask, cur, cycle, remaining = 1, 0, [1], best
    while len(cycle) < n:
        for k in range(1, n):
            if mask >> k & 1:
                continue
            c = H[cur, k] + lookup(mask | 1 << k, k)
            if abs(c - remaining) <= tol:
                remaining = lookup(mask | 1 << k, k)
                mask |= 1 << k
                cur = k
                cycle.append(k + 1)
                break
        else:
            raise RuntimeError("cyclic cover reconstruction failed")
    return tuple(cycle)


def cyclic_cover_time(g: WeightedGraph, backend=None, H=None) -> CyclicCover:
    """Cheapest Hamiltonian cycle under step hitting times (Held-Karp).

    Ties go to the lexicographically smallest cycle written from vertex 1.
    """
    backend = get_backend(backend)
    validate(g)
    if g.n < 2:
        raise InvalidGraphError("cyclic cover time needs at least two vertices")
    if H is None:
        H = hitting_times_steps(g, backend)
    if backend.exact:
        togo = _held_karp_exact(H)
        best = togo[1][0]
        cycle = _reconstruct(H, lambda m, k: togo[m][k], best, 0)
        return CyclicCover(best, cycle)
    cost = np.asarray(H, dtype=np.float64)
    table = kernels.held_karp(cost)
    best = float(table[1, 0])
    tol = 1e-9 * max(1.0, abs(best))
    cycle = _reconstruct(cost, lambda m, k: table[m, k], best, tol)
    return CyclicCover(float(_cycle_cost(cost, cycle)), cycle)


def cyclic_cover_exhaustive(g: WeightedGraph, backend=None, H=None) -> CyclicCover:
    """Brute force over all ``(n-1)!`` cycles through vertex 1; for ``n <= 8``."""
    backend = get_backend(backend)
    validate(g)
    if g.n < 2:
        raise InvalidGraphError("cyclic cover time needs at least two vertices")
    if g.n > 9:
        raise InvalidGraphError("exhaustive search limited to 9 vertices")
    if H is None:
        H = hitting_times_steps(g, backend)
    best = None
    for perm in itertools.permutations(range(2, g.n + 1)):
        cycle = (1,) + perm
        c = _cycle_cost(H, cycle)
        if best is None or c < best.value:
            best = CyclicCover(c, cycle)
    return best


# ---------------------------------------------------------------------------
# closed form and bounds
# ---------------------------------------------------------------------------

class CompleteCover(NamedTuple):
    total: Fraction
    stages: tuple[Fraction, ...]  # expected wait for vertex k+1 once k are known


def complete_graph_cover(n: int) -> CompleteCover:
    """Cover time of the complete graph on ``n`` vertices: ``(n-1) H_{n-1}``."""
    if n < 2:
        raise InvalidGraphError("complete graph cover needs n >= 2")
    stages = tuple(Fraction(n - 1, n - k) for k in range(1, n))
    return CompleteCover(sum(stages, Fraction(0)), stages)


@dataclasses.dataclass(frozen=True)
class BoundReport:
    edges: int
    max_resistance: object
    lower: object  # m * max resistance
    cover: object
    holds: bool  # strict lower < cover
    boundary: bool  # lower == cover
    log_reference: float  # m * R * ln(n), informational only


def cover_lower_bound_check(g: WeightedGraph, cover, backend=None) -> BoundReport:
    backend = get_backend(backend)
    validate(g)
    if not g.is_unweighted:
        raise NotUnweighted("the edge-count bound applies to unweighted graphs")
    R = resistance_matrix(g, backend=backend)
    rmax = R.max()
    lower = g.m * rmax
    cover = backend.scalar(cover)
    if backend.exact:
        boundary = lower == cover
    else:
        boundary = math.isclose(float(lower), float(cover), rel_tol=1e-9)
    holds = lower < cover and not boundary
    return BoundReport(g.m, rmax, lower, cover, holds, boundary,
                       float(lower) * math.log(g.n) if g.n > 1 else 0.0)
