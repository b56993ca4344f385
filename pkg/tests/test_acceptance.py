"""Acceptance criteria 1-9.  Each test prints one ``criterion N: PASS|FAIL|WAIVED`` line."""

from __future__ import annotations

import statistics
import time
from itertools import combinations

import numpy as np
import pytest

from treematch import generators as gen
from treematch import oracle
from treematch.elementary import count_maximum_matchings, is_elementary
from treematch.graph_core import border_and_deep, edge_partition
from treematch.matching import rho
from treematch.solver import maxmax, minmax, verify

from .conftest import spider7

SIZES = range(3, 17)
PER_SIZE = 200
CORPUS_SEED = 1
RUNTIME_LIMIT_S = 300.0
ELEMENTARY_COUNT = 1000
ELEMENTARY_MAX_N = 40
SCALING_SIZES = (250, 500, 1000, 2000, 4000)
SCALING_PER_SIZE = 5
MEDIAN_LIMIT_2000_S = 10.0
SLOPE_LIMIT = 3.5


@pytest.fixture
def emit(capsys):
    def _emit(n: int, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())

    return _emit


class Entry:
    __slots__ = ("tree", "spec", "lo", "hi", "elapsed")

    def __init__(self, tree, spec, lo, hi, elapsed):
        self.tree, self.spec, self.lo, self.hi, self.elapsed = tree, spec, lo, hi, elapsed


@pytest.fixture(scope="module")
def corpus():
    out = []
    began = time.perf_counter()
    for n in SIZES:
        for i in range(PER_SIZE):
            t = gen.random_tree(n, CORPUS_SEED * 1_000_003 + n * 10_007 + i)
            lo, hi = minmax(t), maxmax(t)
            out.append(Entry(t, oracle.spectrum(t), lo, hi, 0.0))
    out[0].elapsed = time.perf_counter() - began
    return out


def test_criterion_1_oracle_equivalence(corpus, emit):
    bad = [e for e in corpus if (e.lo.value, e.hi.value) != (e.spec.l, e.spec.L)]
    runtime = corpus[0].elapsed
    ok = len(corpus) == 2800 and not bad and runtime < RUNTIME_LIMIT_S
    emit(1, ok, f"{len(corpus)} instances, {len(bad)} mismatches, {runtime:.1f}s")
    assert ok


def test_criterion_2_witness_side_conditions(corpus, emit):
    violations = 0
    for e in corpus:
        for report in (e.lo, e.hi):
            cert = verify(e.tree, report, guard=0)
            violations += sum(1 for name, passed, _ in cert.checks
                              if name in ("gamma", "eta", "edge", "matching", "maximum") and not passed)
        if e.hi.required is not None and e.hi.required not in e.hi.witness:
            violations += 1
    emit(2, violations == 0, f"{violations} violations")
    assert violations == 0


def _elementary(seed: int):
    spine = 1 + seed % 13
    return gen.random_elementary(spine, 0.5, seed)


def test_criterion_3_elementary_counts(emit):
    wrong = over = 0
    for seed in range(ELEMENTARY_COUNT):
        t = _elementary(seed)
        assert t.n <= ELEMENTARY_MAX_N
        ok, d = is_elementary(t)
        enumerated = len(oracle.enumerate_maximum_matchings(t, guard=ELEMENTARY_MAX_N))
        wrong += (not ok) or count_maximum_matchings(d) != enumerated
        over += 2 * enumerated > t.n + 1
    anchors = {
        "P7": count_maximum_matchings(is_elementary(gen.make_path(7))[1]),
        "spider7": count_maximum_matchings(is_elementary(spider7())[1]),
    }
    ok = wrong == 0 and over == 0 and anchors == {"P7": 4, "spider7": 4}
    emit(3, ok, f"{ELEMENTARY_COUNT} trees, {wrong} count errors, {over} bound violations, anchors {anchors}")
    assert ok


def test_criterion_4_spectrum_interval(corpus, emit):
    gaps = sum(1 for e in corpus if e.spec.achieved != frozenset(range(e.spec.l, e.spec.L + 1)))
    emit(4, gaps == 0, f"{gaps} trees with gaps")
    assert gaps == 0


def test_criterion_5_global_inequalities(corpus, emit):
    doubling = lipschitz = checked = 0
    for e in corpus:
        if e.tree.n > 12:
            continue
        checked += 1
        sp = e.spec
        doubling += sp.L > 2 * sp.l
        for (i, f), (j, g) in combinations(enumerate(sp.matchings), 2):
            lipschitz += abs(sp.values[i] - sp.values[j]) > rho(f, g)
    ok = doubling == 0 and lipschitz == 0
    emit(5, ok, f"{checked} trees, {doubling} L>2l, {lipschitz} Lipschitz violations")
    assert ok


def test_criterion_6_lambda_identities(corpus, emit):
    failures = checked = 0
    for e in corpus:
        t, sp = e.tree, e.spec
        if t.n > 14:
            continue
        checked += 1
        pi = {x for f in sp.matchings for x in f.edges}
        theta, _ = edge_partition(t)
        _, deep = border_and_deep(t)
        lam = {x: oracle.lambda_min(t, x) for x in deep & pi}
        Lam = {x: oracle.lambda_max(t, x) for x in pi}
        if lam and min(lam.values()) != sp.l:
            failures += 1
        in_theta = [Lam[x] for x in pi & theta]
        if in_theta and max(in_theta) != sp.L:
            failures += 1
        failures += sum(1 for v in Lam.values() if v > sp.L)
    emit(6, failures == 0, f"{checked} trees, {failures} failures")
    assert failures == 0


ANCHORS = {
    "P7": (gen.make_path(7), 2, 3),
    "spider7": (spider7(), 1, 2),
    "spider10": (gen.make_spider(3, 3), 3, 4),
    "P4": (gen.make_path(4), 1, 1),
    "K1,3": (gen.make_star(4), 1, 1),
    "K2": (gen.make_path(2), 0, 0),
}


def test_criterion_7_desk_anchors(emit):
    wrong = []
    for name, (t, l, L) in ANCHORS.items():
        sp = oracle.spectrum(t)
        if (sp.l, sp.L) != (l, L) or (minmax(t).value, maxmax(t).value) != (l, L):
            wrong.append(name)
    emit(7, not wrong, f"{len(ANCHORS)} anchors, wrong: {wrong or 'none'}")
    assert not wrong


def test_criterion_8_scaling(emit):
    medians: dict[str, list[float]] = {"min": [], "max": []}
    for n in SCALING_SIZES:
        times = {"min": [], "max": []}
        for seed in range(SCALING_PER_SIZE):
            t = gen.random_tree(n, seed)
            for name, fn in (("min", minmax), ("max", maxmax)):
                began = time.perf_counter()
                report = fn(t)
                times[name].append(time.perf_counter() - began)
                assert len(report.witness) > 0
        for name in medians:
            medians[name].append(statistics.median(times[name]))
    logn = np.log(np.asarray(SCALING_SIZES, dtype=float))
    slopes = {name: float(np.polyfit(logn, np.log(m), 1)[0]) for name, m in medians.items()}
    at2000 = {name: m[SCALING_SIZES.index(2000)] for name, m in medians.items()}
    ok = all(v < MEDIAN_LIMIT_2000_S for v in at2000.values()) and all(s <= SLOPE_LIMIT for s in slopes.values())
    detail = ", ".join(f"{k} median@2000={at2000[k]:.2f}s slope={slopes[k]:.2f}" for k in medians)
    emit(8, ok, detail)
    assert ok


def test_criterion_9_example_families(capsys):
    status = gen.family_status()
    required = ("2.1", "2.2", "2.4")
    if any(status[name] != "registered" for name in required):
        with capsys.disabled():
            print("\ncriterion 9: WAIVED unavailable: figure missing")
        return
    for name in required:  # pragma: no cover - needs a registered construction
        for k in (1, 2, 3):
            inst = gen.example_family(name, k)
            assert all(inst.identities.values())
    with capsys.disabled():  # pragma: no cover
        print("\ncriterion 9: PASS identities confirmed for k=1..3")
