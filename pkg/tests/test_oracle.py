"""Brute-force oracle; the frozen values below were produced by the oracle itself
before any solver existed and are the reference for every later test."""

from __future__ import annotations

import pytest
from hypothesis import given

from treematch import oracle
from treematch.generators import make_path, make_spider, make_star, random_tree
from treematch.graph_core import Graph, tree_from_edges
from treematch.matching import GuardExceeded, beta

from .conftest import spider7, trees

ANCHORS = {
    "P7": (make_path(7), 2, 3, 4),
    "spider7": (spider7(), 1, 2, 4),
    "spider10": (make_spider(3, 3), 3, 4, 12),
    "P4": (make_path(4), 1, 1, 1),
    "K1,3": (make_star(4), 1, 1, 3),
    "K2": (make_path(2), 0, 0, 1),
    "P5": (make_path(5), 1, 2, 3),
}

# (n, seed, l, L, |M|) for random_tree(n, seed)
FROZEN = [
    (5, 0, 1, 1, 2), (5, 1, 1, 2, 3), (5, 2, 1, 1, 4),
    (7, 0, 2, 2, 8), (7, 1, 2, 2, 7), (7, 2, 2, 2, 6),
    (9, 0, 2, 2, 2), (9, 1, 2, 3, 10), (9, 2, 2, 2, 2),
    (11, 0, 3, 3, 10), (11, 1, 3, 3, 2), (11, 2, 3, 3, 2),
    (13, 0, 3, 4, 12), (13, 1, 4, 4, 10), (13, 2, 4, 4, 5),
]


@pytest.mark.parametrize("name", sorted(ANCHORS))
def test_anchor_spectra(name):
    t, l, L, count = ANCHORS[name]
    sp = oracle.spectrum(t)
    assert (sp.l, sp.L, len(sp.matchings)) == (l, L, count)


@pytest.mark.parametrize("n,seed,l,L,count", FROZEN)
def test_frozen_random_spectra(n, seed, l, L, count):
    sp = oracle.spectrum(random_tree(n, seed))
    assert (sp.l, sp.L, len(sp.matchings)) == (l, L, count)


def test_p5_matchings_listed_in_order():
    ms = oracle.enumerate_maximum_matchings(make_path(5))
    assert [m.edges for m in ms] == [((0, 1), (2, 3)), ((0, 1), (3, 4)), ((1, 2), (3, 4))]


def test_general_graphs():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert (oracle.spectrum(tri).l, oracle.spectrum(tri).L) == (1, 1)
    sp = oracle.spectrum(c4)
    assert (sp.l, sp.L, len(sp.matchings)) == (2, 2, 2)


def test_guard():
    with pytest.raises(GuardExceeded):
        oracle.spectrum(random_tree(30, 1))


def test_lambda_values():
    assert oracle.lambda_min(spider7(), (1, 2)) == 2
    assert oracle.lambda_min(make_path(7), (2, 3)) == 2


@pytest.mark.parametrize("name", ["P7", "spider7", "spider10"])
def test_property_suite_passes_on_anchors(name):
    report = oracle.property_suite(ANCHORS[name][0])
    assert report.ok, report.lines()


def test_property_suite_skips_tree_only_checks_on_triangle():
    tri = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert "n/a" in {r.status for r in oracle.property_suite(tri).results}


@given(trees(1, 11))
def test_spectrum_is_interval_and_bounded(t):
    sp = oracle.spectrum(t)
    assert sp.achieved == frozenset(range(sp.l, sp.L + 1))
    assert 0 <= sp.l <= sp.L <= beta(t)
    assert sp.L <= 2 * sp.l or sp.L == 0


@given(trees(1, 10))
def test_property_suite_on_random_trees(t):
    assert oracle.property_suite(t).ok
