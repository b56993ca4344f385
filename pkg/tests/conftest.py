from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from treematch.graph_core import Tree, tree_from_edges

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def trees(draw, min_n: int = 1, max_n: int = 14) -> Tree:
    """Random labeled tree: each vertex attaches to an earlier one, then labels are shuffled."""
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    perm = draw(st.permutations(range(n)))
    return tree_from_edges(n, [(perm[p], perm[v]) for v, p in zip(range(1, n), parents)])


@st.composite
def elementary_trees(draw, max_spine: int = 12) -> Tree:
    """Path u0..u_k with optional pendant 2-paths on inner vertices."""
    k = draw(st.integers(1, max_spine))
    edges = [(i, i + 1) for i in range(k)]
    nxt = k + 1
    for i in range(1, k):
        if draw(st.booleans()):
            edges += [(i, nxt), (nxt, nxt + 1)]
            nxt += 2
    return tree_from_edges(nxt, edges)


def spider7() -> Tree:
    # spine v0..v4 = 0..4, pendant path v2-u-w with u=5, w=6
    return tree_from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)])


@pytest.fixture
def sp7() -> Tree:
    return spider7()
