import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complete, named_graphs, path, random_graph
from reference_values import LAPLACIAN_G8, RESISTANCE_G8
from walktime.errors import FloatingComponent, NoBoundary
from walktime.graph import WeightedGraph, apply_edge_change
from walktime.numerics import FLOAT, RATIONAL
from walktime.resistance import (
    build_anchored_laplacian,
    harmonic_potentials,
    perturbation_factor,
    resistance_matrix,
    resistance_pair_millman,
)

GRAPHS = named_graphs()


def pinv_resistance(g):
    """Independent float oracle: R_ij = (e_i - e_j)^T L^+ (e_i - e_j)."""
    L = np.zeros((g.n, g.n))
    for u, v, w in g.edges:
        w = float(w)
        L[u - 1, v - 1] -= w
        L[v - 1, u - 1] -= w
        L[u - 1, u - 1] += w
        L[v - 1, v - 1] += w
    Lp = np.linalg.pinv(L)
    d = np.diag(Lp)
    return d[:, None] + d[None, :] - 2 * Lp


def test_anchored_laplacian_examples(g8, k2w5):
    L = build_anchored_laplacian(g8).matrix
    assert list(L[1]) == [0, -14, 4, 7, 1, 2, 0, 0]
    assert (L == RATIONAL.array(LAPLACIAN_G8)).all()
    assert (build_anchored_laplacian(k2w5).matrix == RATIONAL.array([[1, 0], [5, -5]])).all()
    assert (build_anchored_laplacian(path(3)).matrix == RATIONAL.array([[1, 0, 0], [1, -2, 1], [0, 1, -1]])).all()
    L3 = build_anchored_laplacian(g8, anchor=3).matrix
    assert list(L3[2]) == [0, 0, 1, 0, 0, 0, 0, 0]


def test_resistance_examples(g8, k2w5, p3):
    R = resistance_matrix(g8)
    assert R[0, 1] == Fraction(102091, 627268)
    assert R[2, 3] == Fraction(16476, 156817)
    assert (R == RATIONAL.array(RESISTANCE_G8)).all()
    assert resistance_matrix(k2w5)[0, 1] == Fraction(1, 5)
    assert resistance_matrix(p3)[0, 2] == 2
    assert resistance_matrix(WeightedGraph(1, ())).shape == (1, 1)


def test_millman_examples(g8, k2w5, p3):
    assert resistance_pair_millman(k2w5, 1, 2) == Fraction(1, 5)
    assert resistance_pair_millman(g8, 1, 2) == Fraction(102091, 627268)
    assert resistance_pair_millman(p3, 1, 3) == 2


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_oracles_agree(name):
    g = GRAPHS[name]
    R = resistance_matrix(g)
    Rf = resistance_matrix(g, backend=FLOAT)
    ref = pinv_resistance(g)
    np.testing.assert_allclose(Rf, ref, rtol=1e-9, atol=1e-12)
    for i, j in itertools.combinations(range(1, g.n + 1), 2):
        assert resistance_pair_millman(g, i, j) == R[i - 1, j - 1]
        m = resistance_pair_millman(g, i, j, FLOAT)
        assert abs(m - Rf[i - 1, j - 1]) <= 1e-9 * Rf[i - 1, j - 1]
    for a in range(2, g.n + 1):
        assert (resistance_matrix(g, anchor=a) == R).all()


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_metric(name):
    g = GRAPHS[name]
    R = resistance_matrix(g)
    n = g.n
    assert all(R[i, i] == 0 for i in range(n))
    assert (R == R.T).all()
    assert all(R[i, j] > 0 for i in range(n) for j in range(n) if i != j)
    for i, j, k in itertools.product(range(n), repeat=3):
        assert R[i, k] <= R[i, j] + R[j, k]
    # never more than the shortest path with edge resistances 1/w
    D = np.full((n, n), None, dtype=object)
    for i in range(n):
        D[i, i] = Fraction(0)
    for u, v, w in g.edges:
        D[u - 1, v - 1] = D[v - 1, u - 1] = 1 / w
    for k, i, j in itertools.product(range(n), repeat=3):
        if D[i, k] is not None and D[k, j] is not None:
            if D[i, j] is None or D[i, k] + D[k, j] < D[i, j]:
                D[i, j] = D[i, k] + D[k, j]
    assert all(R[i, j] <= D[i, j] for i in range(n) for j in range(n))


def test_harmonic_examples(p3, k2w5, g4):
    assert harmonic_potentials(p3, {1: 0, 3: 1})[1] == Fraction(1, 2)
    assert list(harmonic_potentials(k2w5, {1: 0, 2: 1})) == [0, 1]
    V = harmonic_potentials(g4, {3: 1, 4: 0})
    assert V[0] == Fraction(2, 5) and V[1] == Fraction(1, 5)


def test_harmonic_errors(p3):
    with pytest.raises(NoBoundary):
        harmonic_potentials(p3, {})
    g = WeightedGraph.from_edges(4, [(1, 2), (3, 4)])
    with pytest.raises(FloatingComponent):
        harmonic_potentials(g, {1: 0})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 7))
def test_maximum_principle(seed, n):
    rng = random.Random(seed)
    g = random_graph(rng, n)
    fixed = {v: Fraction(rng.randint(-5, 5)) for v in rng.sample(range(1, n + 1), rng.randint(1, n))}
    V = harmonic_potentials(g, fixed)
    lo, hi = min(fixed.values()), max(fixed.values())
    assert all(lo <= x <= hi for x in V)


def test_perturbation_examples(g8, k2w5):
    rep = perturbation_factor(g8, 1, 2, 2)
    assert rep.add_factor == Fraction(65, 63)
    assert rep.change_factor == Fraction(67, 63)
    assert perturbation_factor(k2w5, 1, 2, 5).add_factor == 2
    tiny = perturbation_factor(g8, 1, 2, Fraction(1, 10**12), FLOAT)
    assert tiny.add_factor == pytest.approx(1.0)


def test_rayleigh_monotone_random():
    rng = random.Random(8)
    for _ in range(6):
        g = random_graph(rng, rng.randint(3, 7))
        R = resistance_matrix(g)
        missing = [(i, j) for i, j in itertools.combinations(range(1, g.n + 1), 2) if not g.has_edge(i, j)]
        for i, j in missing:
            w = Fraction(rng.randint(1, 9), rng.randint(1, 3))
            R2 = resistance_matrix(apply_edge_change(g, i, j, w))
            assert (R2 <= R).all()


def test_complete_graph_resistance():
    for n in range(2, 7):
        R = resistance_matrix(complete(n))
        assert all(R[i, j] == Fraction(2, n) for i in range(n) for j in range(n) if i != j)
