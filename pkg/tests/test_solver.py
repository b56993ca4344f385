from __future__ import annotations

import pytest
from hypothesis import given, settings

from treematch import oracle
from treematch.generators import make_path, make_spider, make_star, random_tree
from treematch.graph_core import GraphError, edge_partition
from treematch.matching import Matching
from treematch.solver import (
    default_pendant,
    force_edge,
    max_value,
    maxmax,
    min_value,
    minmax,
    verify,
)

from .conftest import spider7, trees

P7_MAX_GOLDEN = """objective MAX
n 7
value 3
edge 0 1
witness 3
0 1
2 3
4 5
trace 0
stats calls=1 steps=0 depth=1 memo_hits=0 memo_misses=0
"""


def test_golden_structured_output():
    assert maxmax(make_path(7), (0, 1)).serialize(timing=False) == P7_MAX_GOLDEN


def test_spider10_min_golden():
    text = minmax(make_spider(3, 3)).serialize(timing=False).splitlines()
    assert text[:4] == ["objective MIN", "n 10", "value 3", "witness 4"]
    assert text[8:10] == ["trace 1", text[9]] and text[9].startswith("L2.27 c CUT 7,3")


def test_spider7_min_is_gamma():
    r = minmax(spider7())
    assert r.value == 1 and r.witness.edges == ((0, 1), (3, 4), (5, 6)) and r.trace == []


def test_requested_edges():
    assert maxmax(spider7(), (5, 6)).value == 2
    r = maxmax(make_path(7), (1, 0))
    assert r.witness.edges == ((0, 1), (2, 3), (4, 5)) and r.required == (0, 1)
    with pytest.raises(GraphError, match="not a pendant"):
        maxmax(make_path(7), (2, 3))


def test_tiny_trees():
    assert (minmax(make_path(1)).value, maxmax(make_path(1)).value) == (0, 0)
    assert maxmax(make_path(2)).witness.edges == ((0, 1),)
    assert (minmax(make_star(6)).value, maxmax(make_star(6)).value) == (1, 1)


def test_default_pendant():
    assert default_pendant(spider7()) == (0, 1)
    assert default_pendant(make_path(1)) is None


def test_force_edge_keeps_size():
    t = make_path(7)
    m = force_edge(t, Matching.of(t, [(1, 2), (3, 4), (5, 6)]), (0, 1))
    assert (0, 1) in m and len(m) == 3


@pytest.mark.parametrize("mode", ["dp", "recursive"])
def test_value_modes_agree(mode):
    for seed in range(10):
        t = random_tree(20, seed)
        sp = oracle.spectrum(t, guard=20)
        assert (min_value(t, mode), max_value(t, mode)) == (sp.l, sp.L)


def test_verify_certificate_lines():
    lines = verify(make_path(7), minmax(make_path(7))).lines()
    assert lines[-1] == "certified" and "eta pass 2/2" in lines


def test_verify_flags_wrong_value():
    t = make_path(7)
    r = minmax(t)
    r.value += 1
    cert = verify(t, r)
    assert not cert.ok


@settings(max_examples=120)
@given(trees(1, 13))
def test_solvers_equal_oracle(t):
    sp = oracle.spectrum(t)
    lo, hi = minmax(t, check=True), maxmax(t, check=True)
    assert (lo.value, hi.value) == (sp.l, sp.L)
    assert verify(t, lo).ok and verify(t, hi).ok


@given(trees(3, 11))
def test_every_pendant_edge_reaches_lambda_max(t):
    _, bar = edge_partition(t)
    for e in sorted(bar):
        r = maxmax(t, e)
        assert e in r.witness and r.value == oracle.lambda_max(t, e)


@pytest.mark.parametrize("seed", range(4))
def test_large_trees_in_check_mode(seed):
    t = random_tree(300, seed)
    for fn in (minmax, maxmax):
        r = fn(t, check=True)
        assert verify(t, r).ok
