from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from treematch import generators as gen
from treematch.graph_core import GraphError, tree_from_edges


def test_shapes():
    assert gen.make_path(4).edges == ((0, 1), (1, 2), (2, 3))
    assert gen.make_star(4).edges == ((0, 1), (0, 2), (0, 3))
    sp = gen.make_spider(3, 3)
    assert sp.n == 10 and sp.degree(0) == 3 and sp.edges[:3] == ((0, 1), (0, 4), (0, 7))
    cat = gen.make_caterpillar(3, [2, 0, 1])
    assert cat.n == 6 and cat.degree(0) == 3
    assert gen.make_broom(3, 4).degree(2) == 5


@pytest.mark.parametrize("call", [lambda: gen.make_path(0), lambda: gen.make_spider(0, 2),
                                  lambda: gen.make_caterpillar(2, [1]), lambda: gen.make_broom(0, 1)])
def test_bad_parameters(call):
    with pytest.raises(GraphError):
        call()


def test_prufer_decode_known():
    assert sorted(gen.prufer_decode([3, 3, 3], 5)) == [(0, 3), (1, 3), (2, 3), (3, 4)]


def test_random_tree_frozen():
    assert gen.random_tree(10, 42).edges == (
        (0, 4), (0, 6), (1, 2), (1, 5), (1, 8), (2, 3), (3, 4), (3, 7), (8, 9),
    )


@given(st.integers(1, 60), st.integers(0, 10**6))
def test_random_tree_is_deterministic_tree(n, seed):
    t = gen.random_tree(n, seed)
    assert t == gen.random_tree(n, seed) and len(t.edges) == n - 1


def test_random_tree_covers_all_shapes_at_n8():
    # 23 unlabeled trees on 8 vertices
    seen = {nx.weisfeiler_lehman_graph_hash(nx.Graph(gen.random_tree(8, s).edges), iterations=4)
            for s in range(10_000)}
    canon = {nx.weisfeiler_lehman_graph_hash(g, iterations=4) for g in nx.nonisomorphic_trees(8)}
    assert len(canon) == 23 and seen == canon


def test_random_elementary_shape():
    t = gen.random_elementary(6, 1.0, 0)
    assert t.n == 7 + 2 * 5


def test_example_families_unavailable():
    assert gen.family_status() == {name: "unavailable: figure missing" for name in gen.FAMILIES}
    with pytest.raises(gen.FamilyUnavailable, match="2.1: unavailable: figure missing"):
        gen.example_family("2.1", 3)
    with pytest.raises(KeyError):
        gen.example_family("9.9", 1)


def test_registered_family_checked_by_identities():
    gen.register_family("2.2", lambda k: gen.make_path(2 * k), lambda g, k: {"even": g.n % 2 == 0})
    try:
        inst = gen.example_family("2.2", 3)
        assert inst.graph.n == 6 and inst.identities == {"even": True}
        gen.register_family("2.2", lambda k: gen.make_path(3), lambda g, k: {"even": False})
        with pytest.raises(ValueError, match="identities fail: even"):
            gen.example_family("2.2", 1)
    finally:
        gen.unregister_family("2.2")


def test_build_dispatch():
    assert gen.build(gen.FamilySpec("spider", (("legs", 3), ("leg_len", 3)))) == gen.make_spider(3, 3)
    assert gen.build(gen.FamilySpec("random", (("n", 9),), seed=2)) == gen.random_tree(9, 2)
    with pytest.raises(KeyError):
        gen.build(gen.FamilySpec("nope"))
