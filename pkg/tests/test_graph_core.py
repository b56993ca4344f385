from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given

from treematch.graph_core import (
    Graph,
    GraphError,
    NotATreeError,
    ParseError,
    border_and_deep,
    distance,
    edge,
    edge_partition,
    parse_edge_list,
    peel_levels,
    split_at_edge,
    tree_from_edges,
    validate_tree,
)
from treematch.generators import make_path, make_spider, make_star

from .conftest import spider7, trees


def test_edge_is_canonical():
    assert edge(5, 2) == (2, 5)
    with pytest.raises(GraphError):
        edge(3, 3)


def test_parse_skips_comments_and_blanks():
    g = parse_edge_list("# header\n\n0 1\n 2 1 \n")
    assert g.n == 3 and g.edges == ((0, 1), (1, 2))


@pytest.mark.parametrize(
    "text,needle",
    [("0 1\n1 x\n", "malformed"), ("0 0\n", "loop"), ("0 1\n1 0\n", "duplicate")],
)
def test_parse_errors(text, needle):
    with pytest.raises(ParseError, match=needle):
        parse_edge_list(text)


def test_validate_tree_rejects():
    with pytest.raises(NotATreeError, match="cycle"):
        validate_tree(parse_edge_list("0 1\n1 2\n0 2\n"))
    with pytest.raises(NotATreeError, match="disconnected"):
        validate_tree(Graph.from_edges(4, [(0, 1), (2, 3)]))
    with pytest.raises(NotATreeError, match="empty"):
        validate_tree(Graph.from_edges(0, []))


def test_single_vertex_is_a_tree():
    assert validate_tree(Graph.from_edges(1, [])).n == 1


def test_edge_partition_spider7():
    theta, bar = edge_partition(spider7())
    assert theta == {(1, 2), (2, 3), (2, 5)}
    assert bar == {(0, 1), (3, 4), (5, 6)}


def test_border_and_deep():
    border, deep = border_and_deep(make_path(7))
    assert border == {1, 5}
    assert deep == {(2, 3), (3, 4)}
    assert border_and_deep(make_star(5)) == (frozenset(), frozenset())


def test_split_at_edge_shares_the_edge():
    sp = split_at_edge(make_path(7), (3, 2))
    assert sp.e == (2, 3)
    assert sp.map1 == (0, 1, 2, 3) and sp.map2 == (2, 3, 4, 5, 6)
    assert sp.side1.n + sp.side2.n == 9
    with pytest.raises(GraphError):
        split_at_edge(make_path(4), (0, 2))


def test_peel_levels_spider10():
    levels, k = peel_levels(make_spider(3, 3))
    assert levels[0] == {3, 6, 9}
    assert k[0] == 3 and len(levels) == 4


def test_distance():
    t = spider7()
    assert distance(t, 0, 6) == 4 and distance(t, 4, 4) == 0


@given(trees(1, 20))
def test_round_trip_and_networkx_agreement(t):
    back = parse_edge_list(t.to_edge_list()) if t.n > 1 else t
    assert back.edges == t.edges
    g = nx.Graph(list(t.edges))
    g.add_nodes_from(range(t.n))
    assert nx.is_tree(g)
    assert sorted(d for _, d in g.degree()) == sorted(t.degree(v) for v in range(t.n))


@given(trees(2, 16))
def test_split_sizes(t):
    for e in t.edges:
        sp = split_at_edge(t, e)
        assert sp.side1.n + sp.side2.n == t.n + 2
        assert e[0] in sp.map1 and e[1] in sp.map2
