"""Maximum matchings, matching arithmetic and the pi-membership test."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .graph_core import Edge, Graph, GraphError, Tree, border_and_deep, edge


class GuardExceeded(RuntimeError):
    """An exact search was asked to run on an input above its size guard."""

    def __init__(self, what: str, size: int, guard: int) -> None:
        self.size = size
        self.guard = guard
        super().__init__(f"{what}: size {size} exceeds guard {guard}")


class MatchingError(ValueError):
    pass


def fingerprint(g: Graph) -> tuple[int, str]:
    digest = hashlib.blake2b(repr(g.edges).encode(), digest_size=8).hexdigest()
    return g.n, digest


@dataclass(frozen=True)
class Matching:
    edges: tuple[Edge, ...]
    host: tuple[int, str]

    @classmethod
    def of(cls, g: Graph, edges: Iterable[Sequence[int]]) -> "Matching":
        canon = tuple(sorted({edge(*e) for e in edges}))
        used: set[int] = set()
        for u, v in canon:
            if not g.has_edge(u, v):
                raise MatchingError(f"edge {u} {v} not in host graph")
            if u in used or v in used:
                raise MatchingError(f"edges share vertex at {u} {v}")
            used.update((u, v))
        return cls(canon, fingerprint(g))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)

    def __contains__(self, e: object) -> bool:
        if not isinstance(e, tuple) or len(e) != 2:
            return False
        return edge(*e) in self.edges

    def covers(self, v: int) -> bool:
        return any(v in e for e in self.edges)


def _forest_order(g: Graph) -> tuple[list[int], list[int]]:
    parent = [-1] * g.n
    seen = [False] * g.n
    order: list[int] = []
    for root in range(g.n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            for w in g.adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    stack.append(w)
    return order, parent


def _is_forest(g: Graph) -> bool:
    order, parent = _forest_order(g)
    roots = sum(1 for p in parent if p < 0)
    return len(g.edges) == g.n - roots


def beta_tree(t: Graph) -> tuple[int, Matching]:
    """Maximum matching of a tree or forest by bottom-up leaf greedy, O(n)."""
    order, parent = _forest_order(t)
    if len(t.edges) != t.n - sum(1 for p in parent if p < 0):
        raise GraphError("beta_tree needs a forest")
    mate = [-1] * t.n
    chosen: list[Edge] = []
    for v in reversed(order):
        p = parent[v]
        if p >= 0 and mate[v] < 0 and mate[p] < 0:
            mate[v], mate[p] = p, v
            chosen.append(edge(v, p))
    return len(chosen), Matching.of(t, chosen)


def beta_general(g: Graph, guard: int = 64) -> int:
    """Exact matching number by memoized search over remaining-vertex masks."""
    if len(g.edges) > guard:
        raise GuardExceeded("beta_general edge count", len(g.edges), guard)
    if _is_forest(g):
        return beta_tree(g)[0]
    nbr = [sum(1 << w for w in g.adjacency[v]) for v in range(g.n)]

    @lru_cache(maxsize=None)
    def best(mask: int) -> int:
        while mask:
            v = (mask & -mask).bit_length() - 1
            cand = nbr[v] & mask
            if cand:
                break
            mask &= ~(1 << v)
        else:
            return 0
        rest = mask & ~(1 << v)
        out = best(rest)
        while cand:
            w = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            out = max(out, 1 + best(rest & ~(1 << w)))
        return out

    return best((1 << g.n) - 1)


def beta(g: Graph, guard: int = 64) -> int:
    if _is_forest(g):
        return beta_tree(g)[0]
    return beta_general(g, guard)


def remove_matching(g: Graph, f: Matching) -> Graph:
    """Residual graph G \\ F: all vertices kept, edges of F deleted."""
    if f.host != fingerprint(g):
        raise MatchingError("matching is bound to a different graph")
    drop = set(f.edges)
    return Graph.from_edges(g.n, [e for e in g.edges if e not in drop])


def rho(f: Matching, f2: Matching) -> int:
    if len(f) != len(f2):
        raise MatchingError("rho needs matchings of equal size")
    return len(set(f.edges) - set(f2.edges))


@lru_cache(maxsize=65536)
def _beta_cached(t: Graph) -> int:
    return beta_tree(t)[0]


def _beta_without(t: Graph, drop: set[int]) -> int:
    keep = [v for v in range(t.n) if v not in drop]
    index = {v: i for i, v in enumerate(keep)}
    sub = Graph.from_edges(
        len(keep), [(index[u], index[v]) for u, v in t.edges if u in index and v in index]
    )
    return beta_tree(sub)[0]


@lru_cache(maxsize=65536)
def in_pi(t: Tree, e: Edge) -> bool:
    """True iff some maximum matching of ``t`` contains ``e``."""
    u, v = edge(*e)
    if not t.has_edge(u, v):
        raise GraphError(f"edge {u} {v} not in tree")
    return _beta_without(t, {u, v}) == _beta_cached(t) - 1


def chi(t: Tree) -> frozenset[Edge]:
    _, deep = border_and_deep(t)
    return frozenset(e for e in deep if in_pi(t, e))
