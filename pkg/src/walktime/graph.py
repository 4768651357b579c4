"""Weighted undirected graphs: parsing, validation and the transformations
used by the solvers (target-set merging, single edge changes).

Vertices are labelled ``1..n`` everywhere in the public API.  Weights are kept
as exact :class:`fractions.Fraction` values; numeric backends convert them when
they build matrices.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import DisconnectedGraph, EmptyGraph, GraphFormatError, InvalidGraphError
from .numerics import get_backend


class Edge(NamedTuple):
    u: int
    v: int
    weight: Fraction


def _as_weight(w) -> Fraction:
    if isinstance(w, float):
        w = Fraction(w)
    elif not isinstance(w, Fraction):
        w = Fraction(w)
    if w <= 0:
        raise InvalidGraphError(f"edge weight must be positive, got {w}")
    return w


@dataclasses.dataclass(frozen=True)
class WeightedGraph:
    """Immutable simple graph with positive weights on ``n`` labelled vertices."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 0:
            raise InvalidGraphError("vertex count must be non-negative")
        seen = set()
        norm = []
        for e in self.edges:
            u, v, w = e
            u, v = int(u), int(v)
            if u == v:
                raise InvalidGraphError(f"self-loop on vertex {u}")
            for x in (u, v):
                if not 1 <= x <= self.n:
                    raise InvalidGraphError(f"vertex {x} out of range 1..{self.n}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidGraphError(f"duplicate edge {key[0]}-{key[1]}")
            seen.add(key)
            norm.append(Edge(key[0], key[1], _as_weight(w)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "WeightedGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; missing weights are 1."""
        out = []
        for e in edges:
            if len(e) == 2:
                out.append(Edge(e[0], e[1], Fraction(1)))
            else:
                out.append(Edge(e[0], e[1], e[2]))
        return cls(n, tuple(out))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> dict[int, dict[int, Fraction]]:
        adj: dict[int, dict[int, Fraction]] = {v: {} for v in range(1, self.n + 1)}
        for u, v, w in self.edges:
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def neighbors(self, i: int) -> dict[int, Fraction]:
        return self.adjacency[i]

    def weight(self, i: int, j: int) -> Fraction:
        """Weight of edge ``{i, j}``; zero when the edge is absent."""
        return self.adjacency[i].get(j, Fraction(0))

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]

    def strength(self, i: int) -> Fraction:
        return sum(self.adjacency[i].values(), Fraction(0))

    @cached_property
    def total_weight(self) -> Fraction:
        return sum((e.weight for e in self.edges), Fraction(0))

    @property
    def is_unweighted(self) -> bool:
        return all(e.weight == 1 for e in self.edges)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def scaled(self, c) -> "WeightedGraph":
        c = Fraction(c)
        return WeightedGraph(self.n, tuple(Edge(u, v, w * c) for u, v, w in self.edges))


# ---------------------------------------------------------------------------
# edge-list format
# ---------------------------------------------------------------------------

def _parse_weight(tok: str, lineno: int) -> Fraction:
    try:
        w = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise GraphFormatError(f"line {lineno}: bad weight {tok!r}") from None
    if w <= 0:
        raise GraphFormatError(f"line {lineno}: weight must be positive, got {tok}")
    return w


def parse_graph(text: str) -> WeightedGraph:
    """Parse the ``n m`` header followed by ``m`` lines of ``i j w``.

    ``#`` starts a comment.  Weights are decimals or ``p/q`` rationals and are
    kept exact.
    """
    header = None
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if header is None:
            if len(toks) != 2:
                raise GraphFormatError(f"line {lineno}: expected header 'n m'")
            try:
                n, m = int(toks[0]), int(toks[1])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: header must be two integers") from None
            if n < 0 or m < 0:
                raise GraphFormatError(f"line {lineno}: negative count in header")
            header = (n, m)
            continue
        if len(toks) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'i j w', got {line!r}")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: vertex labels must be integers") from None
        n = header[0]
        for x in (i, j):
            if not 1 <= x <= n:
                raise GraphFormatError(f"line {lineno}: vertex {x} out of range 1..{n}")
        if i == j:
            raise GraphFormatError(f"line {lineno}: self-loop on vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(f"line {lineno}: duplicate edge {key[0]}-{key[1]}")
        seen.add(key)
        edges.append(Edge(key[0], key[1], _parse_weight(toks[2], lineno)))
    if header is None:
        raise GraphFormatError("missing 'n m' header")
    if len(edges) != header[1]:
        raise GraphFormatError(f"header announces {header[1]} edges, found {len(edges)}")
    return WeightedGraph(header[0], tuple(edges))


def read_graph(path) -> WeightedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def serialize_graph(g: WeightedGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v} {format_weight(w)}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# validation and summaries
# ---------------------------------------------------------------------------

def connected_components(g: WeightedGraph) -> list[list[int]]:
    unseen = set(range(1, g.n + 1))
    comps = []
    while unseen:
        root = min(unseen)
        comp = [root]
        unseen.discard(root)
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if y in unseen:
                    unseen.discard(y)
                    comp.append(y)
                    queue.append(y)
        comps.append(sorted(comp))
    return comps


def validate(g: WeightedGraph) -> WeightedGraph:
    """Raise unless ``g`` is non-empty and connected; returns ``g`` otherwise."""
    if g.n == 0:
        raise EmptyGraph("graph has no vertices")
    comps = connected_components(g)
    if len(comps) > 1:
        raise DisconnectedGraph(comps)
    return g


@dataclasses.dataclass(frozen=True)
class VertexStats:
    strength: tuple  # strength[i-1] = sum of weights incident to i
    total_weight: object


def weights_summary(g: WeightedGraph, backend=None) -> VertexStats:
    backend = get_backend(backend)
    strengths = tuple(backend.scalar(g.strength(i)) for i in range(1, g.n + 1))
    return VertexStats(strengths, backend.scalar(g.total_weight))


def transition_probability(g: WeightedGraph, i: int, j: int, backend=None):
    backend = get_backend(backend)
    for x in (i, j):
        if not 1 <= x <= g.n:
            raise InvalidGraphError(f"vertex {x} out of range 1..{g.n}")
    wi = g.strength(i)
    if wi == 0:
        raise InvalidGraphError(f"vertex {i} is isolated")
    return backend.scalar(g.weight(i, j) / wi)


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------

class MergedGraph(NamedTuple):
    graph: WeightedGraph
    merged: int  # label of the new vertex standing for the target set
    relabel: dict[int, int]  # old label -> new label, for vertices outside S


def merge_target_set(g: WeightedGraph, targets: Iterable[int]) -> MergedGraph:
    """Collapse ``targets`` into a single new vertex.

    Surviving vertices keep their relative order and are renumbered ``1..k``;
    the merged vertex is ``k + 1``.  An edge from ``i`` to the set gets the sum
    of the weights from ``i`` into the set; edges inside the set disappear.
    """
    S = set(targets)
    if not S:
        raise InvalidGraphError("target set is empty")
    for s in S:
        if not 1 <= s <= g.n:
            raise InvalidGraphError(f"vertex {s} out of range 1..{g.n}")
    if len(S) == g.n:
        raise InvalidGraphError("target set covers every vertex")
    keep = [v for v in range(1, g.n + 1) if v not in S]
    relabel = {v: k for k, v in enumerate(keep, start=1)}
    o = len(keep) + 1
    into_set: dict[int, Fraction] = {}
    edges = []
    for u, v, w in g.edges:
        if u in S and v in S:
            continue
        if u in S or v in S:
            x = v if u in S else u
            into_set[x] = into_set.get(x, Fraction(0)) + w
        else:
            edges.append(Edge(relabel[u], relabel[v], w))
    for x, w in into_set.items():
        edges.append(Edge(relabel[x], o, w))
    merged = WeightedGraph(o, tuple(edges))
    validate(merged)
    return MergedGraph(merged, o, relabel)


def apply_edge_change(g: WeightedGraph, i: int, j: int, weight=None, *, mode: str = "add") -> WeightedGraph:
    """Return a copy of ``g`` with edge ``{i, j}`` added, reweighted or deleted.

    ``mode`` is ``"add"`` (edge must be absent), ``"reweight"`` (edge must
    exist) or ``"delete"`` (edge must exist and its removal must keep the
    graph connected).
    """
    if i == j:
        raise InvalidGraphError("self-loops are not allowed")
    for x in (i, j):
        if not 1 <= x <= g.n:
            raise InvalidGraphError(f"vertex {x} out of range 1..{g.n}")
    key = (min(i, j), max(i, j))
    present = g.has_edge(i, j)
    rest = tuple(e for e in g.edges if (e.u, e.v) != key)
    if mode == "delete":
        if not present:
            raise InvalidGraphError(f"no edge {key[0]}-{key[1]} to delete")
        out = WeightedGraph(g.n, rest)
        if len(connected_components(out)) > 1:
            raise DisconnectedGraph(connected_components(out))
        return out
    if weight is None:
        raise InvalidGraphError("a weight is required to add or reweight an edge")
    w = _as_weight(weight)
    if mode == "add" and present:
        raise InvalidGraphError(f"edge {key[0]}-{key[1]} already exists; use mode='reweight'")
    if mode == "reweight" and not present:
        raise InvalidGraphError(f"edge {key[0]}-{key[1]} does not exist")
    if mode not in ("add", "reweight"):
        raise ValueError(f"unknown mode {mode!r}")
    return WeightedGraph(g.n, rest + (Edge(key[0], key[1], w),))
