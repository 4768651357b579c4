import itertools
import random
import sys
from fractions import Fraction

import pytest

from reference_values import G4_EDGES, G8_EDGES
from walktime.graph import WeightedGraph, connected_components


def complete(n, w=1):
    return WeightedGraph.from_edges(n, [(i, j, w) for i, j in itertools.combinations(range(1, n + 1), 2)])


def cycle(n):
    return WeightedGraph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path(n):
    return WeightedGraph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def random_graph(rng: random.Random, n: int, p: float = 0.4, weighted: bool = True) -> WeightedGraph:
    """Connected graph: random spanning tree plus extra edges with probability ``p``."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = set()
    for k in range(1, n):
        u, v = order[k], order[rng.randrange(k)]
        edges.add((min(u, v), max(u, v)))
    for u, v in itertools.combinations(range(1, n + 1), 2):
        if rng.random() < p:
            edges.add((u, v))

    def w():
        return Fraction(rng.randint(1, 9), rng.randint(1, 4)) if weighted else Fraction(1)

    g = WeightedGraph.from_edges(n, [(u, v, w()) for u, v in sorted(edges)])
    assert len(connected_components(g)) == 1
    return g


def all_connected_graphs(n):
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for bits in range(1 << len(pairs)):
        g = WeightedGraph.from_edges(n, [pairs[k] for k in range(len(pairs)) if bits >> k & 1])
        if len(connected_components(g)) == 1:
            yield g


@pytest.fixture
def g8():
    return WeightedGraph.from_edges(8, G8_EDGES)


@pytest.fixture
def g4():
    return WeightedGraph.from_edges(4, G4_EDGES)


@pytest.fixture
def k2w5():
    return WeightedGraph.from_edges(2, [(1, 2, 5)])


@pytest.fixture
def p3():
    return path(3)


@pytest.fixture
def p3w():
    return WeightedGraph.from_edges(3, [(1, 2, 1), (2, 3, 2)])


def named_graphs():
    """Small fixed graphs used across modules."""
    rng = random.Random(20240601)
    gs = {
        "G8": WeightedGraph.from_edges(8, G8_EDGES),
        "G4": WeightedGraph.from_edges(4, G4_EDGES),
        "K2w5": WeightedGraph.from_edges(2, [(1, 2, 5)]),
        "P3": path(3),
        "P3w": WeightedGraph.from_edges(3, [(1, 2, 1), (2, 3, 2)]),
        "K4": complete(4),
        "C5": cycle(5),
        "P6": path(6),
    }
    for k in range(4):
        gs[f"rand{k}"] = random_graph(rng, rng.randint(4, 7))
    return gs


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
