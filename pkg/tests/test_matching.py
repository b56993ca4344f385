from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given

from treematch.generators import make_path, make_star
from treematch.graph_core import Graph, GraphError
from treematch.matching import (
    GuardExceeded,
    Matching,
    MatchingError,
    beta,
    beta_general,
    beta_tree,
    chi,
    in_pi,
    remove_matching,
    rho,
)

from .conftest import spider7, trees


def test_matching_rejects_bad_edges():
    p = make_path(4)
    with pytest.raises(MatchingError):
        Matching.of(p, [(0, 2)])
    with pytest.raises(MatchingError):
        Matching.of(p, [(0, 1), (1, 2)])


def test_matching_membership():
    m = Matching.of(make_path(4), [(1, 0), (2, 3)])
    assert m.edges == ((0, 1), (2, 3))
    assert (1, 0) in m and (1, 2) not in m and m.covers(3)


def test_remove_matching_checks_host():
    m = Matching.of(make_path(4), [(0, 1)])
    assert remove_matching(make_path(4), m).edges == ((1, 2), (2, 3))
    with pytest.raises(MatchingError):
        remove_matching(make_path(5), m)


def test_rho():
    p = make_path(5)
    a = Matching.of(p, [(0, 1), (2, 3)])
    b = Matching.of(p, [(0, 1), (3, 4)])
    assert rho(a, b) == 1 and rho(a, a) == 0


def test_beta_values():
    assert beta(make_path(7)) == 3
    assert beta(make_star(6)) == 1
    assert beta(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])) == 1


def test_general_guard():
    big = Graph.from_edges(80, [(i, (i + 1) % 80) for i in range(80)])
    with pytest.raises(GuardExceeded):
        beta_general(big, guard=64)


def test_pi_and_chi_spider7():
    t = spider7()
    assert in_pi(t, (1, 2)) and in_pi(t, (2, 5))
    assert chi(t) == frozenset()
    assert chi(make_path(7)) == {(2, 3), (3, 4)}
    with pytest.raises(GraphError):
        in_pi(t, (0, 6))


@given(trees(1, 30))
def test_beta_tree_matches_networkx(t):
    size, m = beta_tree(t)
    g = nx.Graph(list(t.edges))
    assert size == len(nx.max_weight_matching(g, maxcardinality=True)) if t.edges else size == 0
    assert len(m) == size
