"""Reduction rules for the min and max residual-matching problems.

Each rule is a small tree pattern (vertices u0..uk with adjacency and degree
constraints) plus a resolver that evaluates the rule's guards (pi-membership,
matching numbers and l/L values of named sub-forests) and returns one of
three actions:

STRIP   delete a vertex set, solve the rest, add listed edges
CUT     delete one edge and solve the resulting forest
SPLIT   solve both sides G(1,x), G(2,x) of an edge x and take the union

Named sub-forests are written S(i, j) and C(i, j): S(i, j) is the side of
edge (u_i, u_j) holding u_i's component, with u_j attached as a leaf, and
C(i, j) is that side without u_j.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from ._forest import Forest
from .elementary import decompose_forest, reduce_forest, reduced_degree
from .graph_core import Edge, Tree, edge
from .matching import Matching

log = logging.getLogger(__name__)

MIN = "MIN"
MAX = "MAX"


class NonExhaustiveCaseAnalysis(RuntimeError):
    """No rule fired on a non-elementary tree."""

    def __init__(self, message: str, context: "BranchContext | None" = None) -> None:
        self.context = context
        super().__init__(message)


class RecombinationError(AssertionError):
    """Sub-results do not combine into a maximum matching."""


# Gamma ----------------------------------------------------------------------


def gamma_forest(f: Forest, seeds: np.ndarray | None = None) -> np.ndarray:
    """Maximum pendant matching of a connected forest piece (n >= 3) as original edges.

    ``seeds`` (original-id edges, pendant in ``f``) are kept; every support
    vertex they leave uncovered receives its smallest-id leaf.
    """
    deg = f.deg
    leaves = np.flatnonzero(deg == 1)
    support = f.indices[f.indptr[leaves]]
    covered = np.zeros(f.n, dtype=bool)
    parts = []
    if seeds is not None and len(seeds):
        a = np.searchsorted(f.verts, seeds[:, 0])
        b = np.searchsorted(f.verts, seeds[:, 1])
        covered[a] = True
        covered[b] = True
        parts.append(seeds)
    free = ~covered[support] & ~covered[leaves]
    sup, idx = np.unique(support[free], return_index=True)
    lv = leaves[free][idx]
    x, y = f.verts[sup], f.verts[lv]
    parts.append(np.stack((np.minimum(x, y), np.maximum(x, y)), axis=1))
    out = np.concatenate(parts) if len(parts) > 1 else parts[0]
    return out[np.lexsort((out[:, 1], out[:, 0]))]


def add_seed(f: Forest, seeds: np.ndarray, x: Edge) -> np.ndarray:
    """Add the pendant edge ``x`` to ``seeds`` unless one of its endpoints is already used."""
    if len(seeds) and (np.isin(np.asarray(x), seeds).any()):
        return seeds
    return np.concatenate((seeds, np.asarray([x], dtype=np.int64)))


def restrict_edges(f: Forest, edges: np.ndarray) -> np.ndarray:
    """Rows of ``edges`` with both endpoints in ``f`` (edges of f when f is induced)."""
    if not len(edges):
        return edges
    pos_a = np.searchsorted(f.verts, edges[:, 0]).clip(max=f.n - 1)
    pos_b = np.searchsorted(f.verts, edges[:, 1]).clip(max=f.n - 1)
    keep = (f.verts[pos_a] == edges[:, 0]) & (f.verts[pos_b] == edges[:, 1])
    return edges[keep]


def build_gamma(t: Tree) -> Matching:
    """One pendant edge per support vertex, smallest leaf first."""
    if t.n < 2:
        return Matching.of(t, [])
    if t.n == 2:
        return Matching.of(t, t.edges)
    f = Forest.from_edges(t.n, t.edges)
    return Matching.of(t, [tuple(e) for e in gamma_forest(f).tolist()])


# Branch context ---------------------------------------------------------------


@dataclass
class BranchContext:
    forest: Forest
    alive: np.ndarray
    pairs: dict[int, tuple[int, int]]
    dstar: np.ndarray
    level: np.ndarray
    vbar: int
    arms: list[list[int]]
    clean: list[bool]

    @property
    def arm_lengths(self) -> list[int]:
        return [len(a) for a in self.arms]

    def clean_lengths(self) -> list[int]:
        return sorted(len(a) for a, c in zip(self.arms, self.clean) if c)

    def describe(self) -> str:
        f = self.forest
        arms = ";".join(
            ",".join(str(f.orig(v)) for v in a) + ("*" if c else "")
            for a, c in zip(self.arms, self.clean)
        )
        return f"vbar={f.orig(self.vbar)} arms={arms}"


def branch_context(f: Forest) -> BranchContext:
    alive, pairs = reduce_forest(f)
    dstar = reduced_degree(f, pairs)
    gstar = f.sub(alive)
    back = np.flatnonzero(alive)
    k = kernels.peel(gstar.n, gstar.indptr, gstar.indices)
    branch = np.flatnonzero(dstar[back] >= 3)
    if len(branch) == 0:
        raise NonExhaustiveCaseAnalysis("tree is elementary: no branch vertex")
    kb = k[branch]
    best = branch[kb == kb.min()]
    vbar = int(back[best.min()])
    level = np.full(f.n, -1, dtype=np.int64)
    level[back] = k
    arms: list[list[int]] = []
    for y in f.nbrs(vbar):
        if not alive[y]:
            continue
        path = [y]
        prev, cur = vbar, y
        while dstar[cur] == 2:
            nxt = next(w for w in f.nbrs(cur) if w != prev and alive[w])
            prev, cur = cur, nxt
            path.append(cur)
        if dstar[cur] == 1:
            arms.append(path)
    arms.sort(key=min)
    deg = f.deg
    clean = [bool(all(deg[w] == dstar[w] for w in a)) for a in arms]
    return BranchContext(f, alive, pairs, dstar, level, vbar, arms, clean)


def locate_branch(t: Tree) -> BranchContext:
    return branch_context(Forest.from_edges(t.n, t.edges))


# Patterns -------------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    size: int
    edges: tuple[tuple[int, int], ...]
    deg: dict[int, int]
    gamma: tuple[tuple[int, int], ...] = ()
    deep: tuple[tuple[int, int], ...] = ()

    @property
    def adj(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.size)]
        for i, j in self.edges:
            out[i].append(j)
            out[j].append(i)
        return out

    def root(self) -> int:
        for want in (1, 2, 3):
            for i in range(self.size):
                if self.deg.get(i) == want:
                    return i
        return 0


def path(k: int, extra: Sequence[tuple[int, int]] = ()) -> tuple[tuple[int, int], ...]:
    return tuple((i, i + 1) for i in range(k - 1)) + tuple(extra)


def _bfs_plan(p: Pattern, anchor: int) -> list[tuple[int, int]]:
    adj = p.adj
    seen = {anchor}
    plan = []
    queue = [anchor]
    while queue:
        i = queue.pop(0)
        for j in adj[i]:
            if j not in seen:
                seen.add(j)
                plan.append((i, j))
                queue.append(j)
    return plan


def embeddings(f: Forest, p: Pattern, anchor: int, v: int, limit: int = 64) -> Iterator[list[int]]:
    """Injective placements of ``p`` with u_anchor = v, in increasing-id order."""
    want = p.deg.get(anchor)
    if want is not None and f.degree(v) != want:
        return
    plan = _bfs_plan(p, anchor)
    m = [-1] * p.size
    m[anchor] = v
    used = {v}
    count = 0

    def rec(step: int) -> Iterator[list[int]]:
        nonlocal count
        if step == len(plan):
            count += 1
            yield list(m)
            return
        i, j = plan[step]
        dj = p.deg.get(j)
        for w in f.nbrs(m[i]):
            if w in used or (dj is not None and f.degree(w) != dj):
                continue
            m[j] = w
            used.add(w)
            yield from rec(step + 1)
            used.discard(w)
            m[j] = -1
            if count >= limit:
                return

    yield from rec(0)


# Guard scope ----------------------------------------------------------------

ValueFn = Callable[[Forest], int]


class Scope:
    """Evaluates and records the guard quantities of one placement."""

    def __init__(self, f: Forest, m: list[int], value: ValueFn, symbol: str) -> None:
        self.f = f
        self.m = m
        self.value = value
        self.symbol = symbol
        self.record: list[tuple[str, int]] = []
        self._cache: dict[tuple, int] = {}

    def _note(self, key: tuple, label: str, fn: Callable[[], int]) -> int:
        if key not in self._cache:
            self._cache[key] = fn()
            self.record.append((label, self._cache[key]))
        return self._cache[key]

    def pi(self, i: int, j: int, name: str) -> bool:
        a, b = self.m[i], self.m[j]
        return bool(self._note(("pi", i, j), f"pi({name})", lambda: int(self.f.in_pi(a, b))))

    def S(self, i: int, j: int, name: str) -> int:
        a, b = self.m[i], self.m[j]
        return self._note(
            ("S", i, j), f"{self.symbol}({name})", lambda: self.value(self.f.side(a, b))
        )

    def C(self, i: int, j: int, name: str) -> int:
        a, b = self.m[i], self.m[j]
        return self._note(
            ("C", i, j), f"{self.symbol}({name}-u{j})", lambda: self.value(self.f.inner(a, b))
        )

    def bS(self, i: int, j: int, name: str) -> int:
        a, b = self.m[i], self.m[j]
        return self._note(("bS", i, j), f"beta({name})", lambda: self.f.side(a, b).beta)

    def bC(self, i: int, j: int, name: str) -> int:
        a, b = self.m[i], self.m[j]
        return self._note(("bC", i, j), f"beta({name}-u{j})", lambda: self.f.inner(a, b).beta)


# Actions --------------------------------------------------------------------


@dataclass(frozen=True)
class Action:
    kind: str
    target: tuple[int, int] | None = None
    remove: tuple[int, ...] = ()
    add: tuple[tuple[int, int], ...] = ()
    force: tuple[int, int] | None = None


def strip(remove: Sequence[int], add: Sequence[tuple[int, int]], force=None) -> Action:
    return Action("STRIP", None, tuple(remove), tuple(add), force)


def cut(i: int, j: int) -> Action:
    return Action("CUT", (i, j))


def split(i: int, j: int) -> Action:
    return Action("SPLIT", (i, j))


Resolver = Callable[[Scope], "tuple[str, Action] | None"]


@dataclass(frozen=True)
class Rule:
    rid: str
    objective: str
    pattern: Pattern
    resolve: Resolver


# Min rules ------------------------------------------------------------------

# Orientation of G(2, e') and G(2, f') in the two rules whose statements and
# proofs disagree.  "literal" follows the statements; "proof" follows the
# equalities used in their proofs (the u0 side is always side 1).
ORIENTATION = {"L2.27": "proof", "L2.28": "proof"}

# At equality the second-level guard of case (g) of L2.30 admits trees where
# SPLIT f' is not optimal; the tie is left undecided so another rule fires.
TIE_G30_UNDECIDED = True


def _r20(s: Scope):
    return "-", strip((0, 1, 2), ((0, 1),))


def _r21(s: Scope):
    return "-", strip((0, 1, 2, 3), ((0, 1), (2, 3)))


def _r23(s: Scope):
    return "-", strip((0, 1), ((0, 1),))


def _r24(s: Scope):
    return "-", cut(2, 3)


def _r25(s: Scope):
    return "-", split(2, 3)


def _r26(s: Scope):
    if not s.pi(2, 3, "e"):
        return "a", split(1, 2)
    lf = s.S(1, 2, "G(1,f)")
    lg = s.S(0, 1, "G(1,g)")
    if lf == 1 + lg:
        return "b", split(0, 1)
    if lf <= lg:
        return "c", split(1, 2)
    return None


def _r27(s: Scope):
    if not s.pi(2, 3, "e"):
        return "a", cut(2, 3)
    if not s.pi(3, 4, "e'"):
        return "b", cut(3, 4)
    if ORIENTATION["L2.27"] == "literal":
        g2, g2u = s.S(3, 4, "G(2,e')"), s.C(3, 4, "G(2,e')")
    else:
        g2, g2u = s.S(4, 3, "G(2,e')"), s.C(4, 3, "G(2,e')")
    lhs = s.S(2, 3, "G(1,e)") + g2u
    rhs = s.C(2, 3, "G(1,e)") + g2
    if lhs <= rhs:
        return "c", cut(3, 4)
    return "d", cut(2, 3)


def _r28(s: Scope):
    if not s.pi(2, 3, "e"):
        return "a", cut(2, 3)
    if not s.pi(3, 4, "e'"):
        return "b", split(4, 5)
    if ORIENTATION["L2.28"] == "literal":
        g2e, g2f = s.S(3, 4, "G(2,e')"), s.S(4, 5, "G(2,f')")
    else:
        g2e, g2f = s.S(4, 3, "G(2,e')"), s.S(5, 4, "G(2,f')")
    lhs = s.C(2, 3, "G(1,e)") + g2e
    rhs = s.S(2, 3, "G(1,e)") + g2f
    if lhs <= rhs:
        return "c", cut(2, 3)
    if lhs >= 1 + rhs:
        return "d", split(4, 5)
    return None


def _r29(s: Scope):
    if not s.pi(3, 4, "e"):
        return "a", split(2, 3)
    if not s.pi(4, 5, "e'"):
        return "b", split(5, 6)
    lhs = s.S(3, 4, "G(1,e)") + s.S(6, 5, "G(2,f')")
    rhs = s.S(2, 3, "G(1,f)") + s.S(5, 4, "G(2,e')")
    if lhs <= rhs:
        return "c", split(5, 6)
    return "d", split(2, 3)


def _r30(s: Scope):
    if not s.pi(2, 3, "e"):
        return "a", cut(2, 3)
    if not s.pi(3, 4, "e'"):
        return "b", split(4, 5)
    lhs = s.C(2, 3, "G(1,e)") + s.S(4, 3, "G(2,e')")
    le = s.S(2, 3, "G(1,e)")
    lf, lg = s.S(5, 4, "G(2,f')"), s.S(6, 5, "G(2,g')")
    bf, bg = s.bS(5, 4, "G(2,f')"), s.bS(6, 5, "G(2,g')")
    if bf == 1 + bg:
        if lhs >= le + lf + 1:
            return "d", split(4, 5)
        if lhs <= le + lf:
            return "e", cut(2, 3)
    elif bf == bg:
        if lf == 1 + lg:
            if lhs <= le + lg:
                return "f", cut(2, 3)
            if lhs >= 2 + le + lg or (lhs == 1 + le + lg and not TIE_G30_UNDECIDED):
                return "g", split(4, 5)
        elif lf <= lg:
            if lhs >= le + lf + 1:
                return "h", split(4, 5)
            if lhs <= le + lf:
                return "i", cut(2, 3)
    return None


def _r31(s: Scope):
    if not s.pi(3, 4, "e"):
        return "a", split(2, 3)
    if not s.pi(4, 5, "e'"):
        return "b", split(5, 6)
    x = s.S(2, 3, "G(1,f)") + s.S(5, 4, "G(2,e')")
    le = s.S(3, 4, "G(1,e)")
    lf, lg = s.S(6, 5, "G(2,f')"), s.S(7, 6, "G(2,g')")
    bf, bg = s.bS(6, 5, "G(2,f')"), s.bS(7, 6, "G(2,g')")
    if bf == 1 + bg:
        if x >= le + lf:
            return "d", split(5, 6)
        return "e", split(2, 3)
    if bf == bg:
        if lf == 1 + lg:
            if x <= le + lg:
                return "f", split(2, 3)
            return "g", split(5, 6)
        if lf <= lg:
            if x >= le + lf:
                return "h", split(5, 6)
            return "i", split(2, 3)
    return None


def _r32(s: Scope):
    if not s.pi(2, 3, "e"):
        return "a", split(1, 2)
    if not s.pi(3, 4, "e'"):
        return "b", split(4, 5)
    y1 = s.S(2, 3, "G(1,e)") + s.S(5, 4, "G(2,f')")
    y2 = s.S(1, 2, "G(1,f)") + s.S(4, 3, "G(2,e')")
    bf, bg = s.bS(5, 4, "G(2,f')"), s.bS(6, 5, "G(2,g')")
    if bf == 1 + bg:
        if y1 >= y2:
            return "d", split(1, 2)
        return "e", split(4, 5)
    if bf != bg:
        return None
    rf, rg = s.S(5, 4, "G(2,f')"), s.S(6, 5, "G(2,g')")
    lf, lg = s.S(1, 2, "G(1,f)"), s.S(0, 1, "G(1,g)")
    right_low, right_up = rf <= rg, rf == 1 + rg
    left_low, left_up = lf <= lg, lf == 1 + lg
    if right_low and left_low:
        if y1 >= y2:
            return "f", split(1, 2)
        return "g", split(4, 5)
    if right_up and left_up:
        return "h", split(5, 6)
    if right_up and left_low:
        return "i", split(1, 2)
    if right_low and left_up:
        return "j", split(4, 5)
    return None


MIN_RULES: dict[str, Rule] = {
    r.rid: r
    for r in [
        Rule("L2.20", MIN, Pattern(3, path(3), {0: 1, 2: 1}, gamma=((0, 1),)), _r20),
        Rule("L2.21", MIN, Pattern(4, path(4), {0: 1, 3: 1, 2: 2}, gamma=((0, 1),)), _r21),
        Rule("L2.23", MIN, Pattern(5, path(5), {0: 1, 4: 1, 1: 2, 3: 2}), _r23),
        Rule("L2.24", MIN, Pattern(5, path(5), {0: 1, 4: 1, 1: 2}, gamma=((3, 4),)), _r24),
        Rule(
            "L2.25",
            MIN,
            Pattern(6, path(6), {0: 1, 5: 1, 1: 2, 3: 2}, gamma=((4, 5),), deep=((2, 3),)),
            _r25,
        ),
        Rule(
            "L2.26",
            MIN,
            Pattern(5, path(5), {4: 1, 1: 2, 2: 2}, gamma=((3, 4),), deep=((0, 1),)),
            _r26,
        ),
        Rule("L2.27", MIN, Pattern(7, path(7), {0: 1, 6: 1, 1: 2, 5: 2}), _r27),
        Rule("L2.28", MIN, Pattern(8, path(8), {0: 1, 7: 1, 1: 2, 4: 2, 6: 2}), _r28),
        Rule(
            "L2.29", MIN, Pattern(9, path(9), {0: 1, 8: 1, 1: 2, 3: 2, 5: 2, 7: 2}), _r29
        ),
        Rule("L2.30", MIN, Pattern(7, path(7), {0: 1, 1: 2, 4: 2, 5: 2}), _r30),
        Rule("L2.31", MIN, Pattern(8, path(8), {0: 1, 1: 2, 3: 2, 5: 2, 6: 2}), _r31),
        Rule("L2.32", MIN, Pattern(7, path(7), {1: 2, 2: 2, 4: 2, 5: 2}), _r32),
    ]
}

MIN_ORDER = ["L2.23", "L2.21", "L2.20"] + [f"L2.{i}" for i in range(24, 33)]


# Max rules ------------------------------------------------------------------


def _c14(s: Scope):
    return "-", strip((0, 1), ((0, 1),), force=(2, 3))


def _r41(s: Scope):
    return "-", strip((0, 1, 2), ((0, 1),))


def _r42(s: Scope):
    return "-", strip((0, 1, 2, 3), ((0, 1), (2, 3)))


def _r43(s: Scope):
    b_action = strip((3, 4), ((3, 4),), force=(0, 1))
    if not s.pi(2, 5, "f"):
        return "a", cut(2, 5)
    if not s.pi(1, 2, "e"):
        return "b", b_action
    whole, inner = s.S(5, 2, "G(1,f)"), s.C(5, 2, "G(1,f)")
    if whole <= 1 + inner:
        return "d", cut(2, 5)
    if whole >= 2 + inner:
        return "e", b_action
    return None


def _r47(s: Scope):
    return "-", split(0, 1)


def _r48(s: Scope):
    return "-", split(1, 2)


def _r49(s: Scope):
    bg, bg2 = s.bS(8, 2, "G(1,g)"), s.bC(8, 2, "G(1,g)")
    if bg == bg2:
        return "a", split(2, 3)
    if bg == bg2 + 1:
        lg, lg2 = s.S(8, 2, "G(1,g)"), s.C(8, 2, "G(1,g)")
        if lg == lg2:
            return "b", split(8, 2)
        if lg <= lg2 - 1:
            return "c", split(2, 3)
    return None


def _pair_rule(f_edge, e_edge, e2_edge, f2_edge, strict_d: bool):
    """Shared shape of the rules choosing between SPLIT at f and SPLIT at f'."""

    def resolve(s: Scope):
        if not s.pi(*e_edge, "e"):
            return "a", split(*f_edge)
        if not s.pi(*e2_edge, "e'"):
            return "b", split(*f2_edge)
        lhs = s.S(*e_edge, "G(1,e)") + s.S(f2_edge[1], f2_edge[0], "G(2,f')")
        rhs = s.S(*f_edge, "G(1,f)") + s.S(e2_edge[1], e2_edge[0], "G(2,e')")
        if lhs >= rhs:
            return "c", split(*f2_edge)
        if lhs <= rhs - (1 if strict_d else 0):
            return "d", split(*f_edge)
        return None

    return resolve


def _r53(s: Scope):
    if not s.pi(3, 4, "e"):
        return "a", split(2, 3)
    if not s.pi(4, 5, "e'"):
        return "b", split(5, 6)
    bg, bg2 = s.bS(9, 2, "G(1,g)"), s.bC(9, 2, "G(1,g)")
    lg, lg2 = s.S(9, 2, "G(1,g)"), s.C(9, 2, "G(1,g)")
    le2, lf2 = s.S(5, 4, "G(2,e')"), s.S(6, 5, "G(2,f')")
    if bg == bg2:
        if lg2 + le2 <= lg + lf2:
            return "d", split(5, 6)
        if lg2 + le2 >= lg + lf2 + 1:
            return "e", split(2, 3)
    elif bg == bg2 + 1:
        if lg == lg2:
            return "f", split(5, 6)
        if lg <= lg2 - 1:
            if lg2 + le2 <= lg + lf2:
                return "g", split(5, 6)
            if lg2 + le2 >= lg + lf2 + 1:
                return "h", split(2, 3)
    return None


def _r54(s: Scope):
    if not s.pi(3, 4, "e"):
        return "a", split(2, 3)
    if not s.pi(4, 5, "e'"):
        return "b", split(5, 6)
    bg, bg2 = s.bS(12, 2, "G(1,g)"), s.bC(12, 2, "G(1,g)")
    lg, lg2 = s.S(12, 2, "G(1,g)"), s.C(12, 2, "G(1,g)")
    lf2, lgp = s.S(6, 5, "G(2,f')"), s.S(7, 6, "G(2,g')")
    if bg == bg2:
        if lg2 + lgp <= lg + lf2:
            return "d", split(5, 6)
        return "e", split(2, 3)
    if bg == bg2 + 1:
        if lg == lg2:
            return "f", split(5, 6)
        if lg <= lg2 - 1:
            if lg2 + lgp <= lg + lf2:
                return "g", split(5, 6)
            return "h", split(2, 3)
    return None


def _r55(s: Scope):
    if not s.pi(3, 4, "e"):
        return "a", split(2, 3)
    if not s.pi(4, 5, "e'"):
        return "b", split(5, 6)
    bg, bg2 = s.bS(13, 2, "G(1,g)"), s.bC(13, 2, "G(1,g)")
    lg, lg2 = s.S(13, 2, "G(1,g)"), s.C(13, 2, "G(1,g)")
    lh, lh2 = s.S(14, 6, "G(2,g')"), s.C(14, 6, "G(2,g')")
    if bg == bg2:
        if lg2 + lh <= lg + lh2:
            return "d", split(5, 6)
        return "e", split(2, 3)
    if bg == bg2 + 1:
        if lg == lg2 and lh == lh2:
            return "f", split(13, 2)
        if lg == lg2 and lh <= lh2 - 1:
            return "g", split(5, 6)
        if lg <= lg2 - 1 and lh == lh2:
            return "h", split(2, 3)
        if lg <= lg2 - 1 and lh <= lh2 - 1:
            if lg + lh2 >= lg2 + lh:
                return "i", split(5, 6)
            return "j", split(2, 3)
    return None


MAX_RULES: dict[str, Rule] = {
    r.rid: r
    for r in [
        Rule("C2.14", MAX, Pattern(4, path(4), {0: 1, 1: 2, 2: 2}), _c14),
        Rule("L2.41", MAX, Pattern(3, path(3), {0: 1, 2: 1}), _r41),
        Rule("L2.42", MAX, Pattern(4, path(4), {0: 1, 3: 1, 2: 2}), _r42),
        Rule(
            "L2.43",
            MAX,
            Pattern(6, path(5, [(2, 5)]), {0: 1, 4: 1, 1: 2, 3: 2}),
            _r43,
        ),
        Rule("L2.47", MAX, Pattern(4, path(4), {1: 2, 3: 1}), _r47),
        Rule(
            "L2.48",
            MAX,
            Pattern(7, path(5, [(2, 5), (5, 6)]), {4: 1, 6: 1, 1: 2, 5: 2, 2: 3}),
            _r48,
        ),
        Rule(
            "L2.49",
            MAX,
            Pattern(
                9,
                path(6, [(6, 7), (2, 8), (3, 6)]),
                {0: 1, 5: 1, 7: 1, 1: 2, 4: 2, 6: 2, 2: 3, 3: 3},
            ),
            _r49,
        ),
        Rule(
            "L2.50",
            MAX,
            Pattern(5, path(5), {1: 2, 3: 2}),
            _pair_rule((0, 1), (1, 2), (2, 3), (3, 4), False),
        ),
        Rule(
            "L2.51",
            MAX,
            Pattern(8, path(6, [(6, 7), (3, 6)]), {1: 2, 4: 2, 6: 2, 3: 3, 7: 1}),
            _pair_rule((0, 1), (1, 2), (2, 3), (3, 4), True),
        ),
        Rule(
            "L2.52",
            MAX,
            Pattern(
                11,
                path(7, [(7, 8), (9, 10), (2, 7), (4, 9)]),
                {1: 2, 5: 2, 7: 2, 9: 2, 2: 3, 4: 3, 8: 1, 10: 1},
            ),
            _pair_rule((1, 2), (2, 3), (3, 4), (4, 5), False),
        ),
        Rule(
            "L2.53",
            MAX,
            Pattern(
                10,
                path(7, [(7, 8), (2, 9), (3, 8)]),
                {0: 1, 7: 1, 1: 2, 8: 2, 5: 2, 2: 3, 3: 3},
            ),
            _r53,
        ),
        Rule(
            "L2.54",
            MAX,
            Pattern(
                13,
                path(8, [(8, 9), (10, 11), (2, 12), (3, 8), (5, 10)]),
                {0: 1, 9: 1, 11: 1, 1: 2, 8: 2, 10: 2, 6: 2, 2: 3, 3: 3, 5: 3},
            ),
            _r54,
        ),
        Rule(
            "L2.55",
            MAX,
            Pattern(
                15,
                path(9, [(9, 10), (11, 12), (2, 13), (3, 10), (5, 12), (6, 14)]),
                {0: 1, 9: 1, 11: 1, 8: 1, 1: 2, 10: 2, 12: 2, 7: 2, 2: 3, 3: 3, 5: 3, 6: 3},
            ),
            _r55,
        ),
    ]
}

MAX_ORDER = ["C2.14", "L2.41", "L2.42", "L2.43"] + [f"L2.{i}" for i in range(47, 56)]


def min_preference(ctx: BranchContext) -> list[str]:
    """Rules suggested by the clean-arm lengths at the branch vertex."""
    lens = ctx.clean_lengths()
    pref: list[str] = []
    if any(len(a) == 2 for a in ctx.arms) and ctx.dstar[ctx.vbar] != ctx.forest.deg[ctx.vbar]:
        pref.append("L2.23")
    table = {
        (1, 1): "L2.20",
        (1, 2): "L2.21",
        (1, 3): "L2.24",
        (1, 4): "L2.25",
        (3, 3): "L2.27",
        (3, 4): "L2.28",
        (4, 4): "L2.29",
    }
    if len(lens) >= 2:
        a, b = lens[0], lens[1]
        key = (min(a, 5), min(b, 5))
        if key in table:
            pref.append(table[key])
        elif key == (1, 5):
            pref.append("L2.26")
        elif key == (3, 5):
            pref.append("L2.30")
        elif key == (4, 5):
            pref.append("L2.31")
        elif key == (5, 5):
            pref.append("L2.32")
        elif 2 in key:
            pref += ["L2.23", "L2.21"]
    elif len(lens) == 1:
        pref += {
            1: ["L2.24", "L2.25", "L2.26"],
            2: ["L2.23", "L2.21"],
            3: ["L2.27", "L2.28", "L2.30"],
            4: ["L2.28", "L2.29", "L2.31"],
        }.get(lens[0], ["L2.30", "L2.31", "L2.32"])
    else:
        pref += [f"L2.{i}" for i in range(27, 33)]
    return pref


def max_preference(ctx: BranchContext) -> list[str]:
    lens = ctx.clean_lengths()
    if any(x >= 3 for x in lens):
        return ["C2.14"]
    if len(lens) >= 2 and lens[0] == 1:
        return ["L2.41", "L2.42"]
    if len(lens) >= 2 and lens[0] == 2:
        return ["L2.43"]
    if len(lens) == 1 and lens[0] == 1:
        return ["L2.47", "L2.48", "L2.49"]
    return [f"L2.{i}" for i in range(50, 56)]


# Step -------------------------------------------------------------------------


@dataclass
class ReductionStep:
    rule: str
    case: str
    action: str
    vertices: tuple[int, ...]
    target: Edge | None = None
    removed: tuple[int, ...] = ()
    extension: tuple[Edge, ...] = ()
    forced: Edge | None = None
    guards: tuple[tuple[str, int], ...] = ()
    sub_sizes: tuple[int, ...] = ()
    local: dict = field(default_factory=dict, repr=False, compare=False)

    def trace_line(self) -> str:
        sizes = ",".join(str(s) for s in self.sub_sizes) or "-"
        guards = " ".join(f"{k}={v}" for k, v in self.guards) or "-"
        return f"{self.rule} {self.case} {self.action} {sizes} {guards}"


def _is_deep(f: Forest, a: int, b: int) -> bool:
    def border(v: int) -> bool:
        if f.degree(v) < 2:
            return False
        kinds = {f.degree(w) == 1 for w in f.nbrs(v)}
        return kinds == {True, False}

    return f.degree(a) >= 2 and f.degree(b) >= 2 and not border(a) and not border(b)


def _predicates_hold(f: Forest, p: Pattern, m: list[int], gamma_leaf: np.ndarray | None) -> bool:
    for i, j in p.gamma:
        a, b = m[i], m[j]
        if gamma_leaf is None:
            return False
        leaf = a if f.degree(a) == 1 else b if f.degree(b) == 1 else -1
        if leaf < 0 or not gamma_leaf[leaf]:
            return False
    for i, j in p.deep:
        if not _is_deep(f, m[i], m[j]):
            return False
    return True


def _progress(f: Forest, m: list[int], act: Action, objective: str) -> bool:
    if act.kind == "SPLIT":
        a, b = m[act.target[0]], m[act.target[1]]
        if objective == MIN:
            # the union of the two sides is only guaranteed for deep edges
            return _is_deep(f, a, b)
        return f.degree(a) >= 2 and f.degree(b) >= 2
    return True


def _anchor_tiers(ctx: BranchContext) -> tuple[list[int], list[int]]:
    f = ctx.forest
    near: list[tuple[int, int]] = []
    for arm in ctx.arms:
        for d, v in enumerate(arm[:9], start=1):
            near.append((d, v))
            if v in ctx.pairs:
                w, u = ctx.pairs[v]
                near += [(d + 1, u), (d + 2, w)]
    if ctx.vbar in ctx.pairs:
        w, u = ctx.pairs[ctx.vbar]
        near += [(1, u), (2, w)]
    for y in f.nbrs(ctx.vbar):
        near.append((1, y))
    seen = {ctx.vbar}
    tier2 = []
    for _, v in sorted(near):
        if v not in seen:
            seen.add(v)
            tier2.append(v)
    return [ctx.vbar], tier2


def _try_rule(
    f: Forest,
    rule: Rule,
    anchors: Iterable[tuple[int, int]],
    gamma_leaf: np.ndarray | None,
    value: ValueFn,
    symbol: str,
) -> tuple[Rule, list[int], str, Action, Scope] | None:
    for idx, v in anchors:
        for m in embeddings(f, rule.pattern, idx, v):
            if not _predicates_hold(f, rule.pattern, m, gamma_leaf):
                continue
            scope = Scope(f, m, value, symbol)
            got = rule.resolve(scope)
            if got is None:
                continue
            case, act = got
            if _progress(f, m, act, rule.objective):
                return rule, m, case, act, scope
    return None


def select_rule(
    f: Forest,
    objective: str,
    ctx: BranchContext,
    value: ValueFn,
    gamma_leaf: np.ndarray | None = None,
) -> ReductionStep:
    """Pick the first applicable rule: near the branch vertex first, then anywhere."""
    rules = MIN_RULES if objective == MIN else MAX_RULES
    order = MIN_ORDER if objective == MIN else MAX_ORDER
    pref = min_preference(ctx) if objective == MIN else max_preference(ctx)
    ranked = list(dict.fromkeys(pref + order))
    symbol = "l" if objective == MIN else "L"
    tier1, tier2 = _anchor_tiers(ctx)
    found = None
    for tier in (tier1, tier2):
        for rid in ranked:
            rule = rules[rid]
            anchors = [(i, v) for v in tier for i in range(rule.pattern.size)]
            found = _try_rule(f, rule, anchors, gamma_leaf, value, symbol)
            if found:
                break
        if found:
            break
    if not found:
        for rid in ranked:
            rule = rules[rid]
            r = rule.pattern.root()
            want = rule.pattern.deg.get(r)
            cands = range(f.n) if want is None else np.flatnonzero(f.deg == want).tolist()
            found = _try_rule(f, rule, ((r, v) for v in cands), gamma_leaf, value, symbol)
            if found:
                break
    if not found:
        raise NonExhaustiveCaseAnalysis(f"no rule applies ({ctx.describe()})", ctx)
    rule, m, case, act, scope = found
    return make_step(f, rule.rid, case, act, m, scope.record)


def make_step(
    f: Forest, rid: str, case: str, act: Action, m: list[int], record: list[tuple[str, int]]
) -> ReductionStep:
    orig = tuple(f.orig(v) for v in m)
    target = None
    sizes: tuple[int, ...]
    if act.kind == "STRIP":
        sizes = (f.n - len(act.remove),)
    else:
        a, b = m[act.target[0]], m[act.target[1]]
        target = f.orig_edge(a, b)
        side_a = int(f.side_mask(a, b).sum())
        side_b = f.n + 2 - side_a
        sizes = (side_a - 1, side_b - 1) if act.kind == "CUT" else (side_a, side_b)
    return ReductionStep(
        rule=rid,
        case=case,
        action=act.kind,
        vertices=orig,
        target=target,
        removed=tuple(sorted(f.orig(m[i]) for i in act.remove)),
        extension=tuple(f.orig_edge(m[i], m[j]) for i, j in act.add),
        forced=f.orig_edge(m[act.force[0]], m[act.force[1]]) if act.force else None,
        guards=tuple(record),
        sub_sizes=sizes,
        local={"m": m, "action": act},
    )


def subproblems(f: Forest, step: ReductionStep) -> list[Forest]:
    """Sub-forests of a step, in the order sub-results are expected."""
    m, act = step.local["m"], step.local["action"]
    if act.kind == "STRIP":
        return [f.minus_vertices([m[i] for i in act.remove])]
    a, b = m[act.target[0]], m[act.target[1]]
    if act.kind == "CUT":
        return [f.minus_edge(a, b)]
    lo, hi = (a, b) if f.orig(a) < f.orig(b) else (b, a)
    return [f.side(lo, hi), f.side(hi, lo)]


# Public wrappers on Tree --------------------------------------------------------


def dp_value(objective: str) -> ValueFn:
    pick = 1 if objective == MIN else 2
    return lambda f: f.lL[pick]


def _tree_forest(t: Tree) -> Forest:
    return Forest.from_edges(t.n, t.edges)


def _wrap_value(value_fn: Callable | None, objective: str) -> ValueFn:
    if value_fn is None:
        return dp_value(objective)

    def call(f: Forest) -> int:
        total = 0
        for comp in f.components():
            if comp.m == 0:
                continue
            vmap = comp.verts.tolist()
            index = {v: i for i, v in enumerate(vmap)}
            sub = Tree.from_edges(comp.n, [(index[a], index[b]) for a, b in comp.edges_orig()])
            total += int(value_fn(Tree(sub.n, sub.edges, sub.adjacency)))
        return total

    return call


def _gamma_leaf(f: Forest, gamma: Iterable[Edge]) -> np.ndarray:
    mask = np.zeros(f.n, dtype=bool)
    for a, b in gamma:
        la, lb = f.local(a), f.local(b)
        mask[la if f.degree(la) == 1 else lb] = True
    return mask


def select_min_rule(
    t: Tree, gamma: Matching | Iterable[Edge], ctx: BranchContext | None = None, value_fn=None
) -> ReductionStep:
    f = _tree_forest(t)
    ctx = ctx if ctx is not None and ctx.forest.n == f.n else branch_context(f)
    return select_rule(f, MIN, ctx, _wrap_value(value_fn, MIN), _gamma_leaf(f, gamma))


def select_max_rule(t: Tree, ctx: BranchContext | None = None, value_fn=None) -> ReductionStep:
    f = _tree_forest(t)
    ctx = ctx if ctx is not None and ctx.forest.n == f.n else branch_context(f)
    return select_rule(f, MAX, ctx, _wrap_value(value_fn, MAX))


def apply_step(
    t: Tree, step: ReductionStep, sub_results: Sequence[tuple[Iterable[Edge], int]]
) -> tuple[Matching, int]:
    """Recombine sub-results (original-id edges and values) into a solution of ``t``."""
    from .matching import beta_tree

    edges: set[Edge] = set()
    for sub_f, _ in sub_results:
        edges.update(edge(*e) for e in sub_f)
    edges.update(step.extension)
    used: list[int] = [v for e in edges for v in e]
    if len(used) != len(set(used)):
        raise RecombinationError(f"{step.rule}: recombined edges are not a matching")
    result = Matching.of(t, edges)
    if len(result) != beta_tree(t)[0]:
        raise RecombinationError(f"{step.rule}: recombined matching is not maximum")
    values = [v for _, v in sub_results]
    if step.action == "STRIP":
        value = values[0] + (1 if step.rule in ("L2.20", "L2.21", "L2.41", "L2.42") else 0)
    else:
        value = sum(values)
    f = _tree_forest(t)
    actual = f.residual_beta(f.mate_from_edges(list(result.edges)))
    if step.rule in ("L2.20", "L2.21", "L2.41", "L2.42") or step.action in ("CUT", "SPLIT"):
        if actual != value:
            raise RecombinationError(f"{step.rule}: value identity fails ({actual} != {value})")
    return result, actual


def is_elementary_forest(f: Forest) -> bool:
    return decompose_forest(f) is not None
