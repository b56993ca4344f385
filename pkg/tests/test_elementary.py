from __future__ import annotations

import pytest
from hypothesis import given

from treematch import oracle
from treematch.elementary import (
    ElementaryError,
    count_maximum_matchings,
    enumerate_elementary,
    is_elementary,
    solve_elementary_max,
    solve_elementary_min,
    star_reduce,
)
from treematch.generators import make_path, make_spider, random_elementary
from treematch.graph_core import edge_partition

from .conftest import elementary_trees, spider7


def test_path_decomposition():
    ok, d = is_elementary(make_path(7))
    assert ok and d.spine == tuple(range(7)) and d.pendants == {}
    assert count_maximum_matchings(d) == 4


def test_spider7_decomposition():
    ok, d = is_elementary(spider7())
    assert ok and d.n == 4 and len(d.pendants) == 1
    assert count_maximum_matchings(d) == 4


def test_even_path_has_one_matching():
    _, d = is_elementary(make_path(6))
    assert count_maximum_matchings(d) == 1 and len(enumerate_elementary(d)) == 1


def test_spider10_is_not_elementary():
    assert is_elementary(make_spider(3, 3)) == (False, None)
    with pytest.raises(ElementaryError):
        solve_elementary_min(make_spider(3, 3), [])


def test_star_reduce_spider7():
    r = star_reduce(spider7())
    assert r.reduced.n == 5 and r.removed_pairs == {2: (0, 1)}


def test_solve_spider7_and_p7():
    m, val = solve_elementary_min(spider7(), [(0, 1), (3, 4), (5, 6)])
    assert m.edges == ((0, 1), (3, 4), (5, 6)) and val == 1
    m, val = solve_elementary_max(spider7(), (5, 6))
    assert (5, 6) in m and val == 2
    m, val = solve_elementary_max(make_path(7), (0, 1))
    assert m.edges == ((0, 1), (2, 3), (4, 5)) and val == 3


def test_max_rejects_internal_edge():
    with pytest.raises(ElementaryError):
        solve_elementary_max(make_path(7), (2, 3))


@pytest.mark.parametrize("seed", range(40))
def test_count_equals_enumeration(seed):
    t = random_elementary(6 + seed % 9, 0.5, seed)
    ok, d = is_elementary(t)
    assert ok
    ms = oracle.enumerate_maximum_matchings(t, guard=41)
    assert count_maximum_matchings(d) == len(ms)
    assert set(enumerate_elementary(d)) == set(ms)
    assert 2 * len(ms) <= t.n + 1


@given(elementary_trees(8))
def test_solvers_match_oracle(t):
    ok, _ = is_elementary(t)
    assert ok
    sp = oracle.spectrum(t, guard=41)
    gamma = oracle.pendant_gamma(t) if t.n >= 3 else []
    m, val = solve_elementary_min(t, gamma)
    assert val == sp.l and set(gamma) <= set(m.edges)
    _, val = solve_elementary_max(t)
    assert val == sp.L
    _, bar = edge_partition(t)
    for e in sorted(bar):
        m, val = solve_elementary_max(t, e)
        assert e in m and val == oracle.lambda_max(t, e, guard=41)
