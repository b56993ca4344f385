"""The compiled kernels must agree with the pure-Python fallback bit for bit."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from treematch import _kernels_py as py
from treematch import kernels
from treematch._forest import Forest
from treematch.generators import make_caterpillar, make_spider, make_star, random_tree

from .conftest import trees

cy = pytest.importorskip("treematch._kernels")


def _forest(t):
    return Forest.from_edges(t.n, t.edges)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert cy.BACKEND == "cython" and py.BACKEND == "python"


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _compare(t):
    f = _forest(t)
    assert _same(cy.build_csr(f.n, f.eu, f.ev), py.build_csr(f.n, f.eu, f.ev))
    ip, ix = f.indptr, f.indices
    assert _same(cy.dfs_preorder(f.n, ip, ix), py.dfs_preorder(f.n, ip, ix))
    o, p = f.order, f.parent
    assert _same(cy.match_forest(o, p), py.match_forest(o, p))
    assert _same(cy.match_forest(o, p, 0, -1), py.match_forest(o, p, 0, -1))
    _, mate = py.match_forest(o, p)
    assert _same(cy.residual_match(o, p, mate), py.residual_match(o, p, mate))
    assert cy.lL_values(ip, ix, o, p) == py.lL_values(ip, ix, o, p)
    assert _same(cy.peel(f.n, ip, ix), py.peel(f.n, ip, ix))


@given(trees(2, 40))
def test_random_trees_agree(t):
    _compare(t)


@pytest.mark.parametrize("n", [2, 3, 8, 9, 10, 17, 64])
def test_stars_agree(n):
    # regression: eight or more leaf children used to overflow the compiled DP
    _compare(make_star(n))


def test_high_degree_shapes_agree():
    _compare(make_caterpillar(5, [12, 0, 30, 1, 9]))
    _compare(make_spider(40, 2))
    _compare(random_tree(2000, 3))


def test_alternate_swap_and_scan_agree():
    t = make_caterpillar(4, [1, 0, 2, 1])
    f = _forest(t)
    o, p = f.order, f.parent
    _, mate = py.match_forest(o, p)
    leaf = next(v for v in range(f.n) if f.degree(v) == 1 and mate[v] < 0)
    sup = f.nbrs(leaf)[0]
    assert _same(cy.alternate_swap(o, p, mate, leaf, sup), py.alternate_swap(o, p, mate, leaf, sup))
    odd = _forest(random_tree(9, 4))
    cands = np.arange(odd.n)
    none = np.zeros(0, dtype=np.int64)
    for maximize in (False, True):
        assert cy.elementary_scan(odd.order, odd.parent, cands, none, none, maximize) == py.elementary_scan(
            odd.order, odd.parent, cands, none, none, maximize
        )
