"""Graph and tree representation, edge-list parsing and structural queries."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

Edge = tuple[int, int]


class GraphError(ValueError):
    """Base class for malformed graph input."""


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class NotATreeError(GraphError):
    """Raised when a graph is disconnected or contains a cycle."""


def edge(u: int, v: int) -> Edge:
    """Canonical edge with the smaller id first."""
    if u == v:
        raise GraphError(f"loop at vertex {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        canon = sorted(edge(int(u), int(v)) for u, v in edges)
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise GraphError(f"duplicate edge {a[0]} {a[1]}")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u} {v} outside vertex range 0..{n - 1}")
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, tuple(canon), tuple(tuple(sorted(a)) for a in adj))

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if len(self.adjacency[v]) == 1]

    def to_edge_list(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges)


@dataclass(frozen=True)
class Tree(Graph):
    """A Graph that has been checked to be connected and acyclic."""


@dataclass(frozen=True)
class SplitPair:
    e: Edge
    side1: Tree
    side2: Tree
    map1: tuple[int, ...]
    map2: tuple[int, ...]


_LINE = re.compile(r"^\s*(\d+)\s+(\d+)\s*$")


def parse_edge_list(text: str | TextIO) -> Graph:
    """Parse the "u v" per line format; '#' lines and blank lines are skipped."""
    if not isinstance(text, str):
        text = text.read()
    seen: set[Edge] = set()
    edges: list[Edge] = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if m is None:
            raise ParseError(f"malformed edge line {raw!r}", lineno)
        u, v = int(m.group(1)), int(m.group(2))
        if u == v:
            raise ParseError(f"loop at vertex {u}", lineno)
        e = edge(u, v)
        if e in seen:
            raise ParseError(f"duplicate edge {e[0]} {e[1]}", lineno)
        seen.add(e)
        edges.append(e)
        max_id = max(max_id, e[1])
    return Graph.from_edges(max_id + 1, edges)


def validate_tree(g: Graph) -> Tree:
    if isinstance(g, Tree):
        return g
    if g.n == 0:
        raise NotATreeError("not a tree: empty graph")
    if len(g.edges) >= g.n:
        raise NotATreeError("not a tree: cycle present")
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    if count != g.n or len(g.edges) != g.n - 1:
        raise NotATreeError("not a tree: disconnected")
    return Tree(g.n, g.edges, g.adjacency)


def tree_from_edges(n: int, edges: Iterable[Sequence[int]]) -> Tree:
    return validate_tree(Graph.from_edges(n, edges))


def edge_partition(t: Graph) -> tuple[frozenset[Edge], frozenset[Edge]]:
    """Split E into internal edges (both endpoints of degree >= 2) and pendant edges."""
    theta = frozenset(e for e in t.edges if t.degree(e[0]) >= 2 and t.degree(e[1]) >= 2)
    return theta, frozenset(t.edges) - theta


def border_and_deep(t: Graph) -> tuple[frozenset[int], frozenset[Edge]]:
    theta, bar = edge_partition(t)
    touches_theta = {v for e in theta for v in e}
    touches_bar = {v for e in bar for v in e}
    border = frozenset(touches_theta & touches_bar)
    deep = frozenset(e for e in theta if e[0] not in border and e[1] not in border)
    return border, deep


def _component(t: Graph, start: int, banned: Edge) -> list[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in t.adjacency[v]:
            if w not in seen and edge(v, w) != banned:
                seen.add(w)
                stack.append(w)
    return sorted(seen)


def induced_tree(t: Graph, vertices: Iterable[int]) -> tuple[Tree, tuple[int, ...]]:
    """Relabel the subgraph induced on ``vertices`` to contiguous ids (order kept)."""
    verts = tuple(sorted(vertices))
    index = {v: i for i, v in enumerate(verts)}
    edges = [(index[u], index[v]) for u, v in t.edges if u in index and v in index]
    return tree_from_edges(len(verts), edges), verts


def split_at_edge(t: Tree, e: Sequence[int]) -> SplitPair:
    """The two subtrees sharing ``e``; side1 holds the component of the smaller endpoint."""
    a, b = edge(*e)
    if not t.has_edge(a, b):
        raise GraphError(f"edge {a} {b} not in tree")
    sides = []
    for own, other in ((a, b), (b, a)):
        comp = _component(t, own, (a, b))
        sub, vmap = induced_tree(t, comp + [other])
        sides.append((sub, vmap))
    return SplitPair((a, b), sides[0][0], sides[1][0], sides[0][1], sides[1][1])


def peel_levels(t: Graph) -> tuple[list[frozenset[int]], tuple[int, ...]]:
    deg = [t.degree(v) for v in range(t.n)]
    k = [-1] * t.n
    cur = [v for v in range(t.n) if deg[v] <= 1]
    queued = set(cur)
    levels: list[frozenset[int]] = []
    while cur:
        levels.append(frozenset(cur))
        for v in cur:
            k[v] = len(levels) - 1
        nxt = []
        for v in cur:
            for w in t.adjacency[v]:
                if w not in queued:
                    deg[w] -= 1
                    if deg[w] <= 1:
                        queued.add(w)
                        nxt.append(w)
        cur = sorted(nxt)
    return levels, tuple(k)


def distance(t: Graph, u: int, v: int) -> int:
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for w in t.adjacency[x]:
            if w not in dist:
                dist[w] = dist[x] + 1
                if w == v:
                    return dist[w]
                queue.append(w)
    raise GraphError(f"vertices {u} and {v} are not connected")


def relabel(t: Graph, mapping: Mapping[int, int]) -> Graph:
    return Graph.from_edges(t.n, [(mapping[u], mapping[v]) for u, v in t.edges])
