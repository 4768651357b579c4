"""Effective resistances of the electrical network whose conductances are the
edge weights.

The production path inverts one anchored Laplacian and reads every pairwise
resistance off the inverse.  :func:`resistance_pair_millman` recomputes one
pair from scratch by fixing two potentials, and serves as an independent
check.
"""

from __future__ import annotations

import dataclasses
from collections import deque

import numpy as np

from .errors import FloatingComponent, InvalidGraphError, NoBoundary
from .graph import WeightedGraph, validate
from .numerics import get_backend, invert_matrix, solve_linear


def conductance_matrix(g: WeightedGraph, backend=None) -> np.ndarray:
    backend = get_backend(backend)
    W = backend.zeros((g.n, g.n))
    for u, v, w in g.edges:
        W[u - 1, v - 1] = W[v - 1, u - 1] = backend.scalar(w)
    return W


@dataclasses.dataclass(frozen=True)
class AnchoredLaplacian:
    matrix: np.ndarray
    anchor: int


def build_anchored_laplacian(g: WeightedGraph, anchor: int = 1, backend=None) -> AnchoredLaplacian:
    """Negated weighted Laplacian with row ``anchor`` replaced by a unit row.

    Off-diagonal entries are the conductances, the diagonal holds minus the
    vertex strength.
    """
    backend = get_backend(backend)
    validate(g)
    if not 1 <= anchor <= g.n:
        raise InvalidGraphError(f"anchor {anchor} out of range 1..{g.n}")
    D = conductance_matrix(g, backend)
    for k in range(g.n):
        D[k, k] = -D[k].sum()
    D[anchor - 1, :] = backend.zeros(g.n)
    D[anchor - 1, anchor - 1] = backend.scalar(1)
    return AnchoredLaplacian(D, anchor)


def resistance_matrix(g: WeightedGraph, anchor: int = 1, backend=None) -> np.ndarray:
    """All pairwise effective resistances from a single matrix inversion."""
    backend = get_backend(backend)
    validate(g)
    if g.n == 1:
        return backend.zeros((1, 1))
    inv = invert_matrix(build_anchored_laplacian(g, anchor, backend).matrix, backend)
    d = np.diagonal(inv).copy()
    R = inv + inv.T - d[:, None] - d[None, :]
    for k in range(g.n):
        R[k, k] = backend.scalar(0)
    return R


def _free_components(g: WeightedGraph, free: set[int]) -> list[set[int]]:
    comps, unseen = [], set(free)
    while unseen:
        root = unseen.pop()
        comp, queue = {root}, deque([root])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if y in unseen:
                    unseen.discard(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(comp)
    return comps


def harmonic_potentials(g: WeightedGraph, fixed: dict, backend=None) -> np.ndarray:
    """Potentials that match ``fixed`` and are harmonic at every other vertex.

    A free vertex's potential is the conductance-weighted mean of its
    neighbours'.  Returns a length-``n`` array indexed by ``vertex - 1``.
    """
    backend = get_backend(backend)
    if not fixed:
        raise NoBoundary("at least one vertex potential must be fixed")
    for v in fixed:
        if not 1 <= v <= g.n:
            raise InvalidGraphError(f"vertex {v} out of range 1..{g.n}")
    free = [v for v in range(1, g.n + 1) if v not in fixed]
    for comp in _free_components(g, set(free)):
        if not any(y in fixed for x in comp for y in g.adjacency[x]):
            raise FloatingComponent(f"vertices {sorted(comp)} touch no fixed vertex")
    V = backend.zeros(g.n)
    for v, val in fixed.items():
        V[v - 1] = backend.scalar(val)
    if not free:
        return V
    pos = {v: k for k, v in enumerate(free)}
    A = backend.zeros((len(free), len(free)))
    b = backend.zeros(len(free))
    for v in free:
        r = pos[v]
        for u, w in g.adjacency[v].items():
            w = backend.scalar(w)
            A[r, r] += w
            if u in pos:
                A[r, pos[u]] -= w
            else:
                b[r] += w * V[u - 1]
    V[np.array(free) - 1] = solve_linear(A, b, backend)
    return V


def resistance_pair_millman(g: WeightedGraph, i: int, j: int, backend=None):
    """Resistance between ``i`` and ``j`` from a 1 V / 0 V potential solve."""
    backend = get_backend(backend)
    validate(g)
    if i == j:
        raise InvalidGraphError("resistance needs two distinct vertices")
    V = harmonic_potentials(g, {i: 1, j: 0}, backend)
    current = sum((backend.scalar(w) * (V[i - 1] - V[u - 1]) for u, w in g.adjacency[i].items()),
                  backend.scalar(0))
    return backend.scalar(1) / current


@dataclasses.dataclass(frozen=True)
class PerturbationReport:
    weight: object
    total_weight: object
    add_factor: object
    change_factor: object


def perturbation_factor(g: WeightedGraph, i: int, j: int, w, backend=None) -> PerturbationReport:
    """Upper bounds on how much inserting (or changing) an edge of weight ``w``
    can inflate commute times.  Uses the total weight of the unmodified graph.
    """
    backend = get_backend(backend)
    w = backend.scalar(w)
    if w <= 0:
        raise InvalidGraphError("perturbation weight must be positive")
    total = backend.scalar(g.total_weight)
    one = backend.scalar(1)
    return PerturbationReport(w, total, one + w / total, one + 2 * w / total)

