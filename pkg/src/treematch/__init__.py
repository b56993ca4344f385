"""Maximum matchings of trees that minimize or maximize the residual matching number."""

from __future__ import annotations

from .graph_core import Graph, Tree, parse_edge_list, tree_from_edges, validate_tree
from .kernels import BACKEND
from .matching import Matching
from .solver import SolveReport, max_value, maxmax, min_value, minmax, verify

__all__ = [
    "BACKEND",
    "Graph",
    "Matching",
    "SolveReport",
    "Tree",
    "max_value",
    "maxmax",
    "min_value",
    "minmax",
    "parse_edge_list",
    "tree_from_edges",
    "validate_tree",
    "verify",
]
__version__ = "0.1.0"
