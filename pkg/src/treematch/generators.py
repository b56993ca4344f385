"""Tree factories: fixed shapes, uniform random labeled trees, example-family slots."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .graph_core import Graph, GraphError, Tree, tree_from_edges


class FamilyUnavailable(LookupError):
    """No construction has been registered for an example family."""


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: tuple[tuple[str, int], ...] = ()
    seed: int | None = None


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise GraphError(msg)


def make_path(n: int) -> Tree:
    _need(n >= 1, "path needs n >= 1")
    return tree_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def make_star(n: int) -> Tree:
    """Star on n vertices: centre 0 joined to 1..n-1."""
    _need(n >= 1, "star needs n >= 1")
    return tree_from_edges(n, [(0, i) for i in range(1, n)])


def make_spider(legs: int, leg_len: int) -> Tree:
    """Centre 0 with ``legs`` paths of ``leg_len`` vertices; leg j occupies a contiguous id block."""
    _need(legs >= 1 and leg_len >= 1, "spider needs legs >= 1 and leg_len >= 1")
    edges = []
    nxt = 1
    for _ in range(legs):
        prev = 0
        for _ in range(leg_len):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return tree_from_edges(nxt, edges)


def make_caterpillar(spine: int, leaf_pattern: Sequence[int]) -> Tree:
    """Path 0..spine-1 with ``leaf_pattern[i]`` leaves hung on spine vertex i."""
    _need(spine >= 1, "caterpillar needs spine >= 1")
    _need(len(leaf_pattern) == spine, "leaf_pattern must have one entry per spine vertex")
    _need(all(k >= 0 for k in leaf_pattern), "leaf counts must be non-negative")
    edges = [(i, i + 1) for i in range(spine - 1)]
    nxt = spine
    for i, k in enumerate(leaf_pattern):
        for _ in range(k):
            edges.append((i, nxt))
            nxt += 1
    return tree_from_edges(nxt, edges)


def make_broom(handle: int, bristles: int) -> Tree:
    """Path of ``handle`` vertices whose last vertex carries ``bristles`` leaves."""
    _need(handle >= 1 and bristles >= 0, "broom needs handle >= 1 and bristles >= 0")
    return make_caterpillar(handle, [0] * (handle - 1) + [bristles])


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    heap = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(heap)
    edges = []
    for x in seq:
        leaf = heapq.heappop(heap)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(heap, x)
    edges.append((heapq.heappop(heap), heapq.heappop(heap)))
    return edges


def random_tree(n: int, seed: int) -> Tree:
    """Uniform random labeled tree on n vertices, via a random Prüfer sequence."""
    _need(n >= 1, "random_tree needs n >= 1")
    if n == 1:
        return tree_from_edges(1, [])
    if n == 2:
        return tree_from_edges(2, [(0, 1)])
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    return tree_from_edges(n, prufer_decode(seq, n))


def random_elementary(spine_len: int, pendant_prob: float, seed: int) -> Tree:
    """Path u0..u_spine_len with a pendant 2-path attached to each inner vertex with probability p."""
    rng = random.Random(seed)
    edges = [(i, i + 1) for i in range(spine_len)]
    nxt = spine_len + 1
    for i in range(1, spine_len):
        if rng.random() < pendant_prob:
            edges += [(i, nxt), (nxt, nxt + 1)]
            nxt += 2
    return tree_from_edges(nxt, edges)


# example families -------------------------------------------------------------


@dataclass
class FamilyEntry:
    build: Callable[[int], Graph]
    identities: Callable[[Graph, int], dict[str, bool]]


@dataclass
class ExampleInstance:
    name: str
    k: int
    graph: Graph
    identities: dict[str, bool] = field(default_factory=dict)


_REGISTRY: dict[str, FamilyEntry] = {}
FAMILIES = ("2.1", "2.2", "2.3", "2.4")


def register_family(name: str, build: Callable[[int], Graph], identities) -> None:
    if name not in FAMILIES:
        raise KeyError(f"unknown example family {name!r}")
    _REGISTRY[name] = FamilyEntry(build, identities)


def unregister_family(name: str) -> None:
    _REGISTRY.pop(name, None)


def example_family(name: str, k: int) -> ExampleInstance:
    """Registered construction for an example family, admitted only if its identities hold."""
    if name not in FAMILIES:
        raise KeyError(f"unknown example family {name!r}")
    entry = _REGISTRY.get(name)
    if entry is None:
        raise FamilyUnavailable(f"{name}: unavailable: figure missing")
    g = entry.build(k)
    checks = entry.identities(g, k)
    if not all(checks.values()):
        failed = ", ".join(key for key, ok in checks.items() if not ok)
        raise ValueError(f"{name}: construction rejected, identities fail: {failed}")
    return ExampleInstance(name, k, g, checks)


def family_status() -> dict[str, str]:
    return {name: ("registered" if name in _REGISTRY else "unavailable: figure missing") for name in FAMILIES}


def build(spec: FamilySpec) -> Tree | Graph:
    p = dict(spec.params)
    fam = spec.family
    if fam == "path":
        return make_path(p["n"])
    if fam == "star":
        return make_star(p["n"])
    if fam == "spider":
        return make_spider(p["legs"], p["leg_len"])
    if fam == "broom":
        return make_broom(p["handle"], p["bristles"])
    if fam == "random":
        return random_tree(p["n"], spec.seed if spec.seed is not None else 0)
    if fam in FAMILIES:
        return example_family(fam, p.get("k", 1)).graph
    raise KeyError(f"unknown family {fam!r}")
