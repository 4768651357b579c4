"""Hot loops: random-walk trials and the Held-Karp table.

Every kernel has a numba implementation and a vectorized numpy one.  The two
produce bit-identical output; numba is used when it imports and the
environment variable ``WALKTIME_NO_NUMBA`` is unset (or ``0``).

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014): trial ``t``
owns the stream whose initial state is ``seed ^ mix64(t)``; each draw adds the
golden-ratio increment and applies the mix64 finalizer.  A uniform in [0, 1)
is the top 53 bits of the output times 2**-53.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and os.environ.get("WALKTIME_NO_NUMBA", "").lower() in ("", "0", "false", "no")

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
S30, S27, S31, S11 = np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11)
INV53 = 1.0 / 9007199254740992.0

HELD_KARP_MAX_N = 20


def _mix64(z):
    z = (z ^ (z >> S30)) * MIX1
    z = (z ^ (z >> S27)) * MIX2
    return z ^ (z >> S31)


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _initial_states(trials: int, seed: int) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np.uint64(seed) ^ _mix64(np.arange(trials, dtype=np.uint64))


def _draw(state: np.ndarray, idx: np.ndarray) -> np.ndarray:
    s = state[idx] + GOLDEN
    state[idx] = s
    return (_mix64(s) >> S11).astype(np.float64) * INV53


def _choose(nbr, cum, deg, total, p, u):
    x = u * total[p]
    k = (cum[p] <= x[:, None]).sum(axis=1)
    k = np.minimum(k, deg[p] - 1)
    return k


def hitting_walks_numpy(nbr, cum, wts, deg, total, start, target, trials, seed, cap):
    state = _initial_states(trials, seed)
    pos = np.full(trials, start, dtype=np.int64)
    steps = np.zeros(trials, dtype=np.int64)
    wsum = np.zeros(trials, dtype=np.float64)
    active = np.flatnonzero(pos != target)
    it = 0
    while active.size:
        if it >= cap:
            return steps, wsum, False
        p = pos[active]
        k = _choose(nbr, cum, deg, total, p, _draw(state, active))
        wsum[active] += wts[p, k]
        pos[active] = nbr[p, k]
        steps[active] += 1
        active = active[pos[active] != target]
        it += 1
    return steps, wsum, True


def cover_walks_numpy(nbr, cum, deg, total, start, trials, seed, cap):
    n = nbr.shape[0]
    state = _initial_states(trials, seed)
    pos = np.full(trials, start, dtype=np.int64)
    seen = np.zeros((trials, n), dtype=bool)
    seen[:, start] = True
    count = np.ones(trials, dtype=np.int64)
    steps = np.zeros(trials, dtype=np.int64)
    active = np.flatnonzero(count < n)
    it = 0
    while active.size:
        if it >= cap:
            return steps, False
        p = pos[active]
        k = _choose(nbr, cum, deg, total, p, _draw(state, active))
        q = nbr[p, k]
        pos[active] = q
        fresh = ~seen[active, q]
        seen[active[fresh], q[fresh]] = True
        count[active] += fresh
        steps[active] += 1
        active = active[count[active] < n]
        it += 1
    return steps, True


def held_karp_numpy(cost):
    n = cost.shape[0]
    full = (1 << n) - 1
    table = np.full((1 << n, n), np.inf)
    table[full, 1:] = cost[1:, 0]
    idx = np.arange(n)
    for mask in range(full - 2, 0, -2):  # odd masks: vertex 0 always visited
        inside = (mask >> idx) & 1 == 1
        ks = idx[~inside]
        js = idx[inside] if mask != 1 else idx[:1]
        if mask != 1:
            js = js[js != 0]
        nxt = table[mask | (1 << ks), ks]
        table[mask, js] = (cost[np.ix_(js, ks)] + nxt[None, :]).min(axis=1)
    return table


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:
    _njit = numba.njit(cache=True, nogil=True)

    @_njit
    def _mix64_nb(z):
        z = (z ^ (z >> S30)) * MIX1
        z = (z ^ (z >> S27)) * MIX2
        return z ^ (z >> S31)

    @_njit
    def _choose_nb(cum, deg, total, p, u):
        x = u * total[p]
        d = deg[p]
        k = 0
        while k < d and cum[p, k] <= x:
            k += 1
        if k >= d:
            k = d - 1
        return k

    @_njit
    def hitting_walks_numba(nbr, cum, wts, deg, total, start, target, trials, seed, cap):
        steps = np.zeros(trials, dtype=np.int64)
        wsum = np.zeros(trials, dtype=np.float64)
        for t in range(trials):
            state = seed ^ _mix64_nb(np.uint64(t))
            pos = start
            s = 0
            acc = 0.0
            while pos != target:
                if s >= cap:
                    return steps, wsum, False
                state = state + GOLDEN
                u = np.float64(_mix64_nb(state) >> S11) * INV53
                k = _choose_nb(cum, deg, total, pos, u)
                acc += wts[pos, k]
                pos = nbr[pos, k]
                s += 1
            steps[t] = s
            wsum[t] = acc
        return steps, wsum, True

    @_njit
    def cover_walks_numba(nbr, cum, deg, total, start, trials, seed, cap):
        n = nbr.shape[0]
        steps = np.zeros(trials, dtype=np.int64)
        seen = np.zeros(n, dtype=np.bool_)
        for t in range(trials):
            state = seed ^ _mix64_nb(np.uint64(t))
            seen[:] = False
            seen[start] = True
            count = 1
            pos = start
            s = 0
            while count < n:
                if s >= cap:
                    return steps, False
                state = state + GOLDEN
                u = np.float64(_mix64_nb(state) >> S11) * INV53
                pos = nbr[pos, _choose_nb(cum, deg, total, pos, u)]
                if not seen[pos]:
                    seen[pos] = True
                    count += 1
                s += 1
            steps[t] = s
        return steps, True

    @_njit
    def held_karp_numba(cost):
        n = cost.shape[0]
        full = (1 << n) - 1
        table = np.full((1 << n, n), np.inf)
        for j in range(1, n):
            table[full, j] = cost[j, 0]
        for mask in range(full - 2, 0, -2):
            for j in range(n):
                if (mask >> j) & 1 == 0:
                    continue
                if j == 0 and mask != 1:
                    continue
                best = np.inf
                for k in range(1, n):
                    if (mask >> k) & 1:
                        continue
                    c = cost[j, k] + table[mask | (1 << k), k]
                    if c < best:
                        best = c
                table[mask, j] = best
        return table


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _use_numba(impl):
    if impl is None:
        return USE_NUMBA
    if impl == "numba":
        if numba is None:
            raise RuntimeError("numba is not installed")
        return True
    if impl == "numpy":
        return False
    raise ValueError(f"unknown kernel implementation {impl!r}")


def hitting_walks(tables, start, target, trials, seed, cap, impl=None):
    """Simulate ``trials`` walks from ``start`` (0-based) to ``target``.

    Returns ``(steps, weight_sums, completed)``; ``completed`` is false when a
    trial reached ``cap`` steps.
    """
    nbr, cum, wts, deg, total = tables
    args = (nbr, cum, wts, deg, total, np.int64(start), np.int64(target),
            np.int64(trials), np.uint64(seed), np.int64(cap))
    if _use_numba(impl):
        return hitting_walks_numba(*args)
    return hitting_walks_numpy(*args)


def cover_walks(tables, start, trials, seed, cap, impl=None):
    nbr, cum, _, deg, total = tables
    args = (nbr, cum, deg, total, np.int64(start), np.int64(trials), np.uint64(seed), np.int64(cap))
    if _use_numba(impl):
        return cover_walks_numba(*args)
    return cover_walks_numpy(*args)


def held_karp(cost, impl=None):
    """Cost-to-go table for the cheapest Hamiltonian cycle through vertex 0.

    ``table[mask, j]`` is the cheapest way to visit every vertex outside
    ``mask`` starting from ``j`` and then return to 0.  Only masks containing
    vertex 0 are filled.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    if cost.shape[0] > HELD_KARP_MAX_N:
        raise ValueError(f"Held-Karp limited to {HELD_KARP_MAX_N} vertices")
    if _use_numba(impl):
        return held_karp_numba(cost)
    return held_karp_numpy(cost)
