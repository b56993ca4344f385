from __future__ import annotations

import pytest
from hypothesis import given

from treematch._forest import Forest
from treematch.generators import make_path, make_spider, random_tree
from treematch.graph_core import edge_partition
from treematch.reductions import (
    MAX_ORDER,
    MIN_ORDER,
    apply_step,
    build_gamma,
    gamma_forest,
    is_elementary_forest,
    locate_branch,
    select_max_rule,
    select_min_rule,
    subproblems,
)
from treematch.solver import maxmax, minmax
from treematch import oracle

from .conftest import spider7, trees


def _forest(t):
    return Forest.from_edges(t.n, t.edges)


def test_rule_orders():
    assert MIN_ORDER[:3] == ["L2.23", "L2.21", "L2.20"] and MIN_ORDER[-1] == "L2.32"
    assert MAX_ORDER[0] == "C2.14" and MAX_ORDER[-1] == "L2.55"


def test_build_gamma_spider7():
    assert build_gamma(spider7()).edges == ((0, 1), (3, 4), (5, 6))


def test_gamma_picks_smallest_leaf_per_support():
    f = _forest(make_spider(4, 1))
    assert [tuple(e) for e in gamma_forest(f).tolist()] == [(0, 1)]


def test_locate_branch_spider10():
    ctx = locate_branch(make_spider(3, 3))
    assert ctx.vbar == 0
    assert ctx.arms == [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert all(ctx.clean)


def test_spider10_min_step():
    t = make_spider(3, 3)
    step = select_min_rule(t, build_gamma(t))
    assert step.trace_line().startswith("L2.27 c CUT 7,3 ")
    assert ("pi(e)", 1) in step.guards
    assert step.sub_sizes == (7, 3)


def test_spider10_max_step():
    step = select_max_rule(make_spider(3, 3))
    assert (step.rule, step.action, step.forced) == ("C2.14", "STRIP", (0, 1))
    assert step.extension == ((2, 3),)


def test_elementary_forest_detection():
    assert is_elementary_forest(_forest(make_path(9)))
    assert not is_elementary_forest(_forest(make_spider(3, 3)))


def _restricted(c, witness):
    own = set(c.edges_orig())
    piece = [e for e in witness if e in own]
    return piece, c.residual_beta(c.mate_from_edges(piece))


def _recombine(t, objective):
    """Apply the top-level step to the pieces of the solver's witness; skip when no rule fires."""
    if is_elementary_forest(_forest(t)) or t.n < 3:
        return None
    if objective == "min":
        step, report = select_min_rule(t, build_gamma(t)), minmax(t)
    else:
        step, report = select_max_rule(t), maxmax(t)
    witness = report.witness.edges
    # the root may swap the split edge out while forcing the required pendant edge
    if step.action == "SPLIT" and step.target not in witness:
        return None
    parts = [_restricted(c, witness) for c in subproblems(_forest(t), step)]
    return step, apply_step(t, step, parts), report


@pytest.mark.parametrize("objective", ["min", "max"])
@pytest.mark.parametrize("seed", range(25))
def test_apply_step_recombines(objective, seed):
    t = random_tree(14 + seed, seed)
    out = _recombine(t, objective)
    if out is None:
        pytest.skip("elementary tree")
    step, (m, value), report = out
    assert len(m) == len(report.witness)
    if step.action in ("CUT", "SPLIT"):
        assert value == report.value


@given(trees(6, 14))
def test_selected_step_children_are_smaller(t):
    f = _forest(t)
    if is_elementary_forest(f):
        return
    for step in (select_min_rule(t, build_gamma(t)), select_max_rule(t)):
        kids = subproblems(f, step)
        assert kids and all(c.n < t.n or c.m < len(t.edges) for c in kids)


@given(trees(6, 12))
def test_min_split_targets_are_in_chi(t):
    if is_elementary_forest(_forest(t)):
        return
    step = select_min_rule(t, build_gamma(t))
    if step.action == "SPLIT":
        theta, _ = edge_partition(t)
        assert step.target in theta
        assert oracle.lambda_min(t, step.target) >= oracle.spectrum(t).l
