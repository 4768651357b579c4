"""Hitting and commute times.

Two notions of "time" are supported: the number of steps (edges traversed)
and the total weight of the traversed edges.  Step counts come from the
resistance matrix in closed form; the weight sum comes from first-step
analysis, one linear system per target.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidGraphError, NotUnweighted
from .graph import WeightedGraph, merge_target_set, validate
from .numerics import get_backend, solve_linear
from .resistance import conductance_matrix, resistance_matrix

STEPS = "steps"
WEIGHT = "weight"


def hitting_times_steps(g: WeightedGraph, backend=None, R=None) -> np.ndarray:
    """Expected step counts ``H[i-1, j-1]`` from ``i`` to first reach ``j``.

    ``H[i, j] = w(G) R[i, j] + 1/2 * sum_k w(k) (R[j, k] - R[i, k])`` where
    ``w(k)`` is the strength of ``k`` and ``w(G)`` the total edge weight.
    """
    backend = get_backend(backend)
    validate(g)
    if R is None:
        R = resistance_matrix(g, backend=backend)
    strength = conductance_matrix(g, backend).sum(axis=1)
    s = R @ strength
    total = backend.scalar(g.total_weight)
    H = total * R + (s[None, :] - s[:, None]) / 2
    for k in range(g.n):
        H[k, k] = backend.scalar(0)
    return H


def first_step_hitting(g: WeightedGraph, backend=None, cost=STEPS) -> np.ndarray:
    """Hitting matrix from the first-step equations, one solve per target.

    ``H[j, j] = 0`` and ``H[i, j] = sum_l p(i, l) (c(i, l) + H[l, j])`` where
    ``c`` is 1 per step (``cost="steps"``) or the weight of the traversed edge
    (``cost="weight"``).
    """
    backend = get_backend(backend)
    validate(g)
    n = g.n
    W = conductance_matrix(g, backend)
    strength = W.sum(axis=1)
    P = W / strength[:, None] if n > 1 else W
    if cost == STEPS:
        step_cost = P.sum(axis=1)
    elif cost == WEIGHT:
        step_cost = (P * W).sum(axis=1)
    else:
        raise ValueError(f"unknown cost {cost!r}")
    H = backend.zeros((n, n))
    for j in range(n):
        rest = [k for k in range(n) if k != j]
        if not rest:
            continue
        A = backend.identity(n - 1) - P[np.ix_(rest, rest)]
        H[rest, j] = solve_linear(A, step_cost[rest], backend)
    return H


def hitting_times_weight(g: WeightedGraph, backend=None) -> np.ndarray:
    """Expected total weight of the edges traversed before first reaching ``j``."""
    return first_step_hitting(g, backend, cost=WEIGHT)


def hitting_times(g: WeightedGraph, sense=STEPS, backend=None) -> np.ndarray:
    if sense == STEPS:
        return hitting_times_steps(g, backend)
    if sense == WEIGHT:
        return hitting_times_weight(g, backend)
    raise ValueError(f"unknown sense {sense!r}")


def commute_times(g: WeightedGraph, backend=None, R=None) -> np.ndarray:
    backend = get_backend(backend)
    validate(g)
    if R is None:
        R = resistance_matrix(g, backend=backend)
    return 2 * backend.scalar(g.total_weight) * R


def tetali_unweighted(g: WeightedGraph, backend=None) -> np.ndarray:
    """Unweighted step hitting times from edge count and vertex degrees."""
    backend = get_backend(backend)
    validate(g)
    if not g.is_unweighted:
        raise NotUnweighted("formula only applies when every weight is 1")
    R = resistance_matrix(g, backend=backend)
    deg = backend.array([g.degree(v) for v in range(1, g.n + 1)])
    s = R @ deg
    H = g.m * R + (s[None, :] - s[:, None]) / 2
    for k in range(g.n):
        H[k, k] = backend.scalar(0)
    return H


class ExperimentalValue(NamedTuple):
    value: object
    reference: object
    note: str


EXPERIMENTAL_NOTE = (
    "experimental: w(i) R_ij sum_k R_ki is not a valid hitting time; "
    "on the path 1-2-3 it gives 6 for 1->3 where the true value is 4"
)


def experimental_first_sense(g: WeightedGraph, i: int, j: int, backend=None, R=None) -> ExperimentalValue:
    """Evaluate ``w(i) * R[i, j] * sum_k R[k, i]`` verbatim.

    Kept for comparison only; ``reference`` carries the closed-form step
    hitting time for the same pair.
    """
    backend = get_backend(backend)
    validate(g)
    if i == j:
        raise InvalidGraphError("need two distinct vertices")
    if R is None:
        R = resistance_matrix(g, backend=backend)
    value = backend.scalar(g.strength(i)) * R[i - 1, j - 1] * R[:, i - 1].sum()
    ref = hitting_times_steps(g, backend, R=R)[i - 1, j - 1]
    return ExperimentalValue(value, ref, EXPERIMENTAL_NOTE)


def hitting_to_set(g: WeightedGraph, targets, i: int, backend=None):
    """Expected steps from ``i`` until the walk first enters ``targets``."""
    targets = set(targets)
    if i in targets:
        raise InvalidGraphError(f"start vertex {i} lies in the target set")
    merged = merge_target_set(g, targets)
    H = hitting_times_steps(merged.graph, backend)
    return H[merged.relabel[i] - 1, merged.merged - 1]
