"""Exact hitting, commute and cover times of random walks on weighted graphs."""

from .errors import WalktimeError
from .graph import WeightedGraph, parse_graph, read_graph, serialize_graph, validate
from .numerics import FLOAT, RATIONAL, get_backend

__version__ = "0.1.0"

__all__ = [
    "FLOAT",
    "RATIONAL",
    "WalktimeError",
    "WeightedGraph",
    "get_backend",
    "parse_graph",
    "read_graph",
    "serialize_graph",
    "validate",
]
