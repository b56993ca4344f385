"""Recursive drivers for the min and max residual-matching problems.

``minmax`` returns a maximum matching F minimizing beta(G \\ F) that also
contains the pendant matching Gamma; ``maxmax`` returns one maximizing it and
containing a chosen pendant edge.  Both run the same driver: base cases
(trivial pieces, Gamma already maximum, elementary trees) are solved directly
and every other tree is reduced by one rule into smaller forests.

The driver uses an explicit task stack since reduction chains on paths and
caterpillars can be thousands of steps deep.  Witness edges go to one shared
list; each reduced piece remembers where its edges start, so the post-order
fix-ups (forcing a required pendant edge, optional self-checks) operate on a
contiguous slice.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels, oracle
from ._forest import Forest
from .elementary import decompose_forest, mate_edges, solve_forest
from .graph_core import Edge, GraphError, Tree, edge, edge_partition
from .matching import GuardExceeded, Matching
from .reductions import (
    MAX,
    MIN,
    NonExhaustiveCaseAnalysis,
    ReductionStep,
    add_seed,
    branch_context,
    gamma_forest,
    restrict_edges,
    select_rule,
    subproblems,
)

log = logging.getLogger(__name__)

_NO_EDGES = np.zeros((0, 2), dtype=np.int64)


class SolverDefect(AssertionError):
    """A self-check inside the driver failed."""


@dataclass
class SolveStats:
    calls: int = 0
    steps: int = 0
    depth: int = 0
    memo_hits: int = 0
    memo_misses: int = 0
    elapsed: float = 0.0

    def line(self) -> str:
        return (
            f"calls={self.calls} steps={self.steps} depth={self.depth} "
            f"memo_hits={self.memo_hits} memo_misses={self.memo_misses}"
        )


@dataclass
class Certificate:
    ok: bool
    checks: list[tuple[str, bool, str]]
    oracle_value: int | None = None

    def lines(self) -> list[str]:
        out = [f"{name} {'pass' if ok else 'FAIL'} {detail}".rstrip() for name, ok, detail in self.checks]
        out.append("certified" if self.ok else "not certified")
        return out


@dataclass
class SolveReport:
    objective: str
    n: int
    value: int
    witness: Matching
    trace: list[ReductionStep] = field(default_factory=list)
    stats: SolveStats = field(default_factory=SolveStats)
    required: Edge | None = None
    oracle_certificate: Certificate | None = None
    fallback: bool = False

    def serialize(self, timing: bool = False) -> str:
        lines = [f"objective {self.objective}", f"n {self.n}", f"value {self.value}"]
        if self.required is not None:
            lines.append(f"edge {self.required[0]} {self.required[1]}")
        lines.append(f"witness {len(self.witness)}")
        lines += [f"{u} {v}" for u, v in self.witness.edges]
        lines.append(f"trace {len(self.trace)}")
        lines += [s.trace_line() for s in self.trace]
        stats = self.stats.line()
        if timing:
            stats += f" elapsed={self.stats.elapsed:.6f}"
        lines.append(f"stats {stats}")
        if self.oracle_certificate is not None:
            c = self.oracle_certificate
            lines.append(f"oracle {c.oracle_value} {'match' if c.ok else 'mismatch'}")
        return "\n".join(lines) + "\n"


# value functions ----------------------------------------------------------


class ValueTable:
    """l- or L-values of sub-forests, memoized by their original-id edge list."""

    def __init__(self, objective: str, mode: str, engine_factory: Callable[[], "_Engine"]) -> None:
        if mode not in ("dp", "recursive"):
            raise ValueError(f"unknown value mode {mode!r}")
        self.objective = objective
        self.mode = mode
        self.memo: dict[bytes, int] = {}
        self.hits = 0
        self.misses = 0
        self._factory = engine_factory
        self._pick = 1 if objective == MIN else 2

    def __call__(self, f: Forest) -> int:
        key = f.key
        got = self.memo.get(key)
        if got is not None:
            self.hits += 1
            return got
        self.misses += 1
        if self.mode == "dp":
            val = f.lL[self._pick]
        else:
            val = 0
            for comp in f.components():
                if comp.m == 0:
                    continue
                sub = self.memo.get(comp.key)
                if sub is None:
                    edges = self._factory().run(comp)
                    sub = comp.residual_beta(comp.mate_from_edges(edges))
                    self.memo[comp.key] = sub
                val += sub
        self.memo[key] = val
        return val


# driver ---------------------------------------------------------------------


@dataclass
class _Frame:
    forest: Forest
    start: int
    depth: int
    required: Edge | None
    gamma: np.ndarray | None
    step: ReductionStep | None


class _Engine:
    def __init__(self, objective: str, values: ValueTable, check: bool, stats: SolveStats) -> None:
        self.objective = objective
        self.values = values
        self.check = check
        self.stats = stats
        self.trace: list[ReductionStep] = []
        self.out: list[Edge] = []

    def run(self, f: Forest, param=None) -> list[Edge]:
        self.out = []
        tasks: list[tuple] = [("solve", f, param, 1)]
        while tasks:
            task = tasks.pop()
            if task[0] == "solve":
                self._solve(task[1], task[2], task[3], tasks)
            else:
                self._finish(task[1])
        return sorted(set(self.out))

    # one piece
    def _solve(self, f: Forest, param, depth: int, tasks: list) -> None:
        if f.n_components > 1:
            for comp in reversed(f.components()):
                tasks.append(("solve", comp, self._restrict(comp, param), depth))
            return
        self.stats.calls += 1
        self.stats.depth = max(self.stats.depth, depth)
        if f.n == 1:
            return
        if f.n == 2:
            self.out.append(f.orig_edge(0, 1))
            return
        start = len(self.out)
        gamma = None
        required = None
        if self.objective == MIN:
            gamma = gamma_forest(f, param)
            if len(gamma) == f.beta:
                self.out.extend(map(tuple, gamma.tolist()))
                return
            local_req = list(zip(np.searchsorted(f.verts, gamma[:, 0]).tolist(),
                                 np.searchsorted(f.verts, gamma[:, 1]).tolist()))
        else:
            required = param
            local_req = [] if required is None else [(f.local(required[0]), f.local(required[1]))]
        dec = decompose_forest(f)
        if dec is not None:
            mate, _ = solve_forest(f, dec, local_req, self.objective == MAX)
            self.out.extend(mate_edges(f, mate))
            return
        step = self._select(f, gamma)
        self.stats.steps += 1
        self.trace.append(step)
        frame = _Frame(f, start, depth, required, gamma, step)
        self.out.extend(step.extension)
        if (required is not None) or self.check:
            tasks.append(("finish", frame))
        subs = subproblems(f, step)
        params = [self._child_param(f, step, sub, gamma, required) for sub in subs]
        for sub, p in reversed(list(zip(subs, params))):
            tasks.append(("solve", sub, p, depth + 1))

    def _select(self, f: Forest, gamma: np.ndarray | None) -> ReductionStep:
        ctx = branch_context(f)
        gleaf = None
        if gamma is not None:
            gleaf = np.zeros(f.n, dtype=bool)
            a = np.searchsorted(f.verts, gamma[:, 0])
            b = np.searchsorted(f.verts, gamma[:, 1])
            gleaf[np.where(f.deg[a] == 1, a, b)] = True
        try:
            return select_rule(f, self.objective, ctx, self.values, gleaf)
        except NonExhaustiveCaseAnalysis:
            log.error("no rule applies: %s edges=%s", ctx.describe(), f.edges_orig())
            raise

    def _restrict(self, f: Forest, param):
        if self.objective == MIN:
            return restrict_edges(f, param if param is not None else _NO_EDGES)
        if param is not None and f.has_vertex(param[0]) and f.has_vertex(param[1]):
            return param
        return None

    def _child_param(self, f: Forest, step: ReductionStep, sub: Forest, gamma, required):
        if self.objective == MIN:
            seeds = restrict_edges(sub, gamma)
            if step.action == "SPLIT":
                seeds = add_seed(sub, seeds, step.target)
            return seeds
        if step.forced is not None:
            return step.forced
        if step.action == "SPLIT":
            return step.target
        return self._restrict(sub, required)

    # post-order fix-ups
    def _finish(self, fr: _Frame) -> None:
        f = fr.forest
        piece = list(dict.fromkeys(self.out[fr.start :]))
        if fr.required is not None and fr.required not in piece:
            piece = force_edges(f, piece, fr.required)
        if self.check:
            self._check_piece(fr, piece)
        del self.out[fr.start :]
        self.out.extend(piece)

    def _check_piece(self, fr: _Frame, piece: list[Edge]) -> None:
        f = fr.forest
        verts = [v for e in piece for v in e]
        rule = f"{fr.step.rule}({fr.step.case})" if fr.step else "?"
        if len(verts) != len(set(verts)):
            raise SolverDefect(f"{rule}: recombined edges are not a matching")
        if len(piece) != f.beta:
            raise SolverDefect(f"{rule}: recombined matching has {len(piece)} edges, beta={f.beta}")
        if fr.gamma is not None and not set(map(tuple, fr.gamma.tolist())) <= set(piece):
            raise SolverDefect(f"{rule}: gamma not contained in the recombined matching")
        got = f.residual_beta(f.mate_from_edges(piece))
        want = f.lL[1 if self.objective == MIN else 2]
        if got != want:
            raise SolverDefect(f"{rule}: residual value {got}, optimum {want}")


def force_edges(f: Forest, piece: list[Edge], e: Edge) -> list[Edge]:
    """Swap the pendant edge ``e`` into a maximum matching along its alternating path."""
    a, b = f.local(e[0]), f.local(e[1])
    leaf, support = (a, b) if f.degree(a) == 1 else (b, a)
    if f.degree(leaf) != 1:
        raise SolverDefect(f"required edge {e} is not pendant")
    mate = f.mate_from_edges(piece)
    before = f.residual_beta(mate)
    new = kernels.alternate_swap(f.order, f.parent, mate, leaf, support)
    if int(new[leaf]) != support or f.residual_beta(new) != before:
        raise SolverDefect(f"forcing {e} changed the residual value")
    return mate_edges(f, new)


# public API -------------------------------------------------------------------


def _forest(t: Tree) -> Forest:
    return Forest.from_edges(t.n, t.edges)


def _solve(
    t: Tree,
    objective: str,
    param,
    value_mode: str,
    check: bool,
    verify_guard: int | None,
) -> SolveReport:
    began = time.perf_counter()
    stats = SolveStats()
    values: ValueTable

    def factory() -> _Engine:
        return _Engine(objective, values, False, SolveStats())

    values = ValueTable(objective, value_mode, factory)
    engine = _Engine(objective, values, check, stats)
    f = _forest(t)
    fallback = False
    try:
        edges = engine.run(f, param)
    except NonExhaustiveCaseAnalysis:
        if verify_guard is None or t.n > verify_guard:
            raise
        edges = _oracle_fallback(t, objective, param)
        fallback = True
    witness = Matching.of(t, edges)
    value = f.residual_beta(f.mate_from_edges(list(witness.edges))) if t.n else 0
    stats.memo_hits, stats.memo_misses = values.hits, values.misses
    stats.elapsed = time.perf_counter() - began
    required = tuple(param) if objective == MAX and param is not None else None
    return SolveReport(objective, t.n, value, witness, engine.trace, stats, required, None, fallback)


def _oracle_fallback(t: Tree, objective: str, param) -> list[Edge]:
    spec = oracle.spectrum(t)
    target = spec.l if objective == MIN else spec.L
    need = set()
    if objective == MIN:
        need = set(map(tuple, gamma_forest(_forest(t)).tolist())) if t.n >= 3 else set()
    elif param is not None:
        need = {tuple(param)}
    for m in spec.members(target):
        if need <= set(m.edges):
            return list(m.edges)
    raise SolverDefect("oracle fallback found no witness")


def default_pendant(t: Tree) -> Edge | None:
    """Pendant edge at the smallest-id leaf."""
    if t.n < 2:
        return None
    leaf = min(t.leaves())
    return edge(leaf, t.adjacency[leaf][0])


def minmax(
    t: Tree, *, value_mode: str = "dp", check: bool = False, fallback_guard: int | None = None
) -> SolveReport:
    """Maximum matching F with minimum beta(G \\ F) that contains Gamma."""
    if t.n < 1:
        raise GraphError("empty tree")
    return _solve(t, MIN, None, value_mode, check, fallback_guard)


def maxmax(
    t: Tree,
    e: Edge | None = None,
    *,
    value_mode: str = "dp",
    check: bool = False,
    fallback_guard: int | None = None,
) -> SolveReport:
    """Maximum matching F with maximum beta(G \\ F) containing the pendant edge ``e``."""
    if t.n < 1:
        raise GraphError("empty tree")
    if e is None:
        e = default_pendant(t)
    else:
        e = edge(*e)
        _, bar = edge_partition(t)
        if e not in bar:
            raise GraphError(f"edge {e[0]} {e[1]} is not a pendant edge")
    return _solve(t, MAX, e, value_mode, check, fallback_guard)


def min_value(t: Tree, value_mode: str = "dp") -> int:
    return _forest_value(t, MIN, value_mode)


def max_value(t: Tree, value_mode: str = "dp") -> int:
    return _forest_value(t, MAX, value_mode)


def _forest_value(g, objective: str, value_mode: str) -> int:
    f = Forest.from_edges(g.n, g.edges) if g.edges else Forest.from_edges(g.n, np.zeros((0, 2)))
    table = ValueTable(objective, value_mode, lambda: _Engine(objective, table, False, SolveStats()))
    return table(f)


def force_edge(t: Tree, f: Matching, e: Edge) -> Matching:
    e = edge(*e)
    if e in f:
        return f
    _, bar = edge_partition(t)
    if e not in bar:
        raise GraphError(f"edge {e[0]} {e[1]} is not a pendant edge")
    forest = _forest(t)
    if len(f) != forest.beta:
        raise SolverDefect("force_edge needs a maximum matching")
    return Matching.of(t, force_edges(forest, list(f.edges), e))


def verify(t: Tree, report: SolveReport, guard: int | None = None) -> Certificate:
    """Structural checks on any size; oracle comparison when ``t`` fits the guard."""
    f = _forest(t)
    checks: list[tuple[str, bool, str]] = []
    edges = list(report.witness.edges)
    used = [v for e in edges for v in e]
    valid = all(t.has_edge(*e) for e in edges) and len(used) == len(set(used))
    checks.append(("matching", valid, ""))
    checks.append(("maximum", len(edges) == f.beta, f"{len(edges)}/{f.beta}"))
    actual = f.residual_beta(f.mate_from_edges(edges)) if valid and edges else (0 if valid else -1)
    checks.append(("value", actual == report.value, f"{actual}/{report.value}"))
    if report.objective == MIN and t.n >= 3:
        gamma = set(map(tuple, gamma_forest(f).tolist()))
        checks.append(("gamma", gamma <= set(edges), ""))
        _, bar = edge_partition(t)
        pend = sum(1 for e in edges if e in bar)
        checks.append(("eta", pend == len(gamma), f"{pend}/{len(gamma)}"))
    if report.objective == MAX and report.required is not None:
        checks.append(("edge", report.required in set(edges), ""))
    oracle_value = None
    limit = oracle.TREE_GUARD if guard is None else guard
    if t.n <= limit:
        try:
            spec = oracle.spectrum(t, limit)
            oracle_value = spec.l if report.objective == MIN else spec.L
            checks.append(("oracle", oracle_value == report.value, f"{oracle_value}/{report.value}"))
        except GuardExceeded:
            checks.append(("oracle", True, "skipped"))
    else:
        checks.append(("oracle", True, "skipped"))
    ok = all(c[1] for c in checks)
    cert = Certificate(ok, checks, oracle_value)
    report.oracle_certificate = cert if oracle_value is not None else None
    return cert
