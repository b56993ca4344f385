"""Elementary trees: star reduction, spine decomposition, counting and solving.

A tree is elementary when deleting one pendant 2-path from every vertex of
degree >= 3 that has one leaves a simple path (the spine).  In such a tree
every maximum matching of a tree without a perfect matching exposes exactly
one vertex, and the exposed vertex determines the matching, so both
objectives reduce to a scan over a short candidate list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._forest import Forest
from .graph_core import Edge, Tree, edge, edge_partition, induced_tree
from .matching import Matching


class ElementaryError(AssertionError):
    """Decomposition, formula and reconstruction disagree."""


@dataclass(frozen=True)
class StarReduction:
    reduced: Tree
    vertex_map: tuple[int, ...]
    removed_pairs: dict[int, tuple[int, int]]


@dataclass(frozen=True)
class ElementaryDecomposition:
    tree: Tree
    spine: tuple[int, ...]
    pendants: dict[int, tuple[int, int]]

    @property
    def n(self) -> int:
        return len(self.spine) - 1

    @property
    def pendant_index_set(self) -> frozenset[int]:
        return frozenset(self.pendants)

    def candidates(self) -> list[int]:
        """Exposed-vertex candidates: even spine positions, then even-position pendant leaves."""
        out = list(self.spine[0::2])
        out += [self.pendants[i][0] for i in sorted(self.pendants) if i % 2 == 0]
        return out


# forest-level routines used by the solver ---------------------------------


def reduce_forest(f: Forest) -> tuple[np.ndarray, dict[int, tuple[int, int]]]:
    """Alive mask of G* and the removed (leaf, middle) pair per reduced vertex."""
    deg = f.deg
    indptr, indices = f.indptr, f.indices
    alive = np.ones(f.n, dtype=bool)
    leaves = np.flatnonzero(deg == 1)
    if len(leaves) == 0:
        return alive, {}
    mid = indices[indptr[leaves]]
    keep = deg[mid] == 2
    leaves, mid = leaves[keep], mid[keep]
    if len(mid) == 0:
        return alive, {}
    first = indices[indptr[mid]]
    second = indices[indptr[mid] + 1]
    hub = np.where(first == leaves, second, first)
    keep = deg[hub] >= 3
    leaves, mid, hub = leaves[keep], mid[keep], hub[keep]
    hubs, idx = np.unique(hub, return_index=True)
    w, u = leaves[idx], mid[idx]
    alive[w] = False
    alive[u] = False
    pairs = {int(h): (int(a), int(b)) for h, a, b in zip(hubs.tolist(), w.tolist(), u.tolist())}
    return alive, pairs


def reduced_degree(f: Forest, pairs: dict[int, tuple[int, int]]) -> np.ndarray:
    dstar = f.deg.copy()
    if pairs:
        dstar[np.fromiter(pairs, dtype=np.int64, count=len(pairs))] -= 1
    return dstar


def decompose_forest(f: Forest) -> tuple[list[int], dict[int, tuple[int, int]]] | None:
    """Spine (local ids, from the smaller end) and pendant pairs keyed by spine index."""
    if f.n == 1:
        return [0], {}
    alive, pairs = reduce_forest(f)
    dstar = reduced_degree(f, pairs)
    if int(dstar[alive].max()) > 2:
        return None
    ends = np.flatnonzero(alive & (dstar == 1))
    start = int(ends[0])
    spine = [start]
    prev, cur = -1, start
    while True:
        nxt = -1
        for w in f.nbrs(cur):
            if w != prev and alive[w]:
                nxt = w
                break
        if nxt < 0:
            break
        spine.append(nxt)
        prev, cur = cur, nxt
    index = {v: i for i, v in enumerate(spine)}
    pend = {index[h]: wu for h, wu in pairs.items()}
    return spine, pend


def forest_candidates(spine: list[int], pend: dict[int, tuple[int, int]]) -> list[int]:
    return spine[0::2] + [pend[i][0] for i in sorted(pend) if i % 2 == 0]


def solve_forest(
    f: Forest,
    decomposition: tuple[list[int], dict[int, tuple[int, int]]],
    required: Sequence[tuple[int, int]],
    maximize: bool,
) -> tuple[np.ndarray, int]:
    """Best maximum matching (mate array) of an elementary tree containing ``required``."""
    order, parent = f.order, f.parent
    req_a = np.asarray([a for a, _ in required], dtype=np.int64)
    req_b = np.asarray([b for _, b in required], dtype=np.int64)
    if 2 * f.beta == f.n:
        mate = f.max_matching()
        if any(int(mate[a]) != b for a, b in required):
            raise ElementaryError("perfect matching misses a required edge")
        return mate, f.residual_beta(mate)
    spine, pend = decomposition
    if (len(spine) - 1) % 2:
        raise ElementaryError("odd spine without a perfect matching")
    cands = np.asarray(forest_candidates(spine, pend), dtype=np.int64)
    x, val, valid, failed = kernels.elementary_scan(order, parent, cands, req_a, req_b, maximize)
    if failed:
        raise ElementaryError(f"{failed} exposed-vertex candidates have no perfect complement")
    if x < 0:
        raise ElementaryError("no maximum matching contains the required edges")
    mate = kernels.match_forest(order, parent, int(x), -1)[1]
    return mate, int(val)


def mate_edges(f: Forest, mate: np.ndarray) -> list[Edge]:
    idx = np.flatnonzero(mate > np.arange(f.n))
    a = f.verts[idx].tolist()
    b = f.verts[mate[idx]].tolist()
    return list(zip(a, b))


# public API on Tree ------------------------------------------------------


def _forest(t: Tree) -> Forest:
    return Forest.from_edges(t.n, t.edges)


def star_reduce(t: Tree) -> StarReduction:
    f = _forest(t)
    alive, pairs = reduce_forest(f)
    keep = np.flatnonzero(alive).tolist()
    reduced, vmap = induced_tree(t, keep)
    return StarReduction(reduced, vmap, dict(pairs))


def is_elementary(t: Tree) -> tuple[bool, ElementaryDecomposition | None]:
    dec = decompose_forest(_forest(t))
    if dec is None:
        return False, None
    spine, pend = dec
    return True, ElementaryDecomposition(t, tuple(spine), dict(pend))


def count_maximum_matchings(d: ElementaryDecomposition) -> int:
    t = d.tree
    if 2 * _forest(t).beta == t.n:
        return 1
    if d.n % 2:
        raise ElementaryError("odd spine length without a perfect matching")
    return d.n // 2 + 1 + sum(1 for i in d.pendants if i % 2 == 0)


def enumerate_elementary(d: ElementaryDecomposition) -> list[Matching]:
    """One maximum matching per exposed-vertex candidate, in candidate order."""
    t = d.tree
    f = _forest(t)
    if 2 * f.beta == t.n:
        return [Matching.of(t, mate_edges(f, f.max_matching()))]
    out = []
    for x in d.candidates():
        size, mate = kernels.match_forest(f.order, f.parent, x, -1)
        if 2 * int(size) != t.n - 1:
            raise ElementaryError(f"no perfect matching after exposing {x}")
        out.append(Matching.of(t, mate_edges(f, mate)))
    expected = count_maximum_matchings(d)
    if len(out) != expected or len(set(out)) != len(out):
        raise ElementaryError(f"enumerated {len(out)} matchings, formula gives {expected}")
    if 2 * len(out) > t.n + 1:
        raise ElementaryError("more maximum matchings than (|V|+1)/2")
    return out


def _required(f: Forest, edges: Iterable[Sequence[int]]) -> list[tuple[int, int]]:
    return [(f.local(a), f.local(b)) for a, b in (edge(*e) for e in edges)]


def solve_elementary_min(t: Tree, gamma: Matching | Iterable[Edge]) -> tuple[Matching, int]:
    ok, d = is_elementary(t)
    if not ok or d is None:
        raise ElementaryError("tree is not elementary")
    f = _forest(t)
    if t.n == 1:
        return Matching.of(t, []), 0
    mate, val = solve_forest(f, (list(d.spine), d.pendants), _required(f, gamma), False)
    return Matching.of(t, mate_edges(f, mate)), val


def solve_elementary_max(t: Tree, e: Edge | None = None) -> tuple[Matching, int]:
    ok, d = is_elementary(t)
    if not ok or d is None:
        raise ElementaryError("tree is not elementary")
    if t.n == 1:
        return Matching.of(t, []), 0
    f = _forest(t)
    req: list[Edge] = []
    if e is not None:
        _, bar = edge_partition(t)
        if edge(*e) not in bar:
            raise ElementaryError(f"edge {e} is not pendant")
        req = [edge(*e)]
    mate, val = solve_forest(f, (list(d.spine), d.pendants), _required(f, req), True)
    return Matching.of(t, mate_edges(f, mate)), val
