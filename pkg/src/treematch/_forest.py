"""Array-backed forest view used by the solver.

A ``Forest`` keeps its vertices as a sorted array of ids from the top-level
tree, so sub-forests of one solve share an id space and local indices keep
the same relative order as the original ids.  Structure is stored as edge
arrays over local indices; CSR adjacency and a DFS preorder are derived
lazily and cached.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import kernels

_I64 = np.int64


class Forest:
    def __init__(self, verts: np.ndarray, eu: np.ndarray, ev: np.ndarray) -> None:
        self.verts = verts
        self.eu = eu
        self.ev = ev

    # construction -------------------------------------------------------
    @classmethod
    def from_edges(cls, n: int, edges) -> "Forest":
        arr = np.asarray(edges, dtype=_I64).reshape(-1, 2)
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        idx = np.lexsort((hi, lo))
        return cls(np.arange(n, dtype=_I64), lo[idx], hi[idx])

    def sub(self, vmask: np.ndarray, emask: np.ndarray | None = None) -> "Forest":
        """Sub-forest on the kept vertices, optionally dropping extra edges."""
        keep = vmask[self.eu] & vmask[self.ev]
        if emask is not None:
            keep &= emask
        newidx = np.cumsum(vmask, dtype=_I64) - 1
        return Forest(self.verts[vmask], newidx[self.eu[keep]], newidx[self.ev[keep]])

    # basic data -----------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.verts)

    @property
    def m(self) -> int:
        return len(self.eu)

    @cached_property
    def deg(self) -> np.ndarray:
        return np.bincount(self.eu, minlength=self.n) + np.bincount(self.ev, minlength=self.n)

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray]:
        return kernels.build_csr(self.n, self.eu, self.ev)

    @property
    def indptr(self) -> np.ndarray:
        return self._csr[0]

    @property
    def indices(self) -> np.ndarray:
        return self._csr[1]

    @cached_property
    def _lists(self) -> tuple[list[int], list[int], list[int]]:
        return self.indptr.tolist(), self.indices.tolist(), self.deg.tolist()

    def nbrs(self, v: int) -> list[int]:
        ip, ix, _ = self._lists
        return ix[ip[v] : ip[v + 1]]

    def degree(self, v: int) -> int:
        return self._lists[2][v]

    @cached_property
    def dfs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return kernels.dfs_preorder(self.n, self.indptr, self.indices)

    @property
    def order(self) -> np.ndarray:
        return self.dfs[0]

    @property
    def parent(self) -> np.ndarray:
        return self.dfs[1]

    @cached_property
    def key(self) -> bytes:
        return self.verts[self.eu].tobytes() + b"|" + self.verts[self.ev].tobytes()

    def orig(self, v: int) -> int:
        return int(self.verts[v])

    def local(self, x: int) -> int:
        i = int(np.searchsorted(self.verts, x))
        if i >= self.n or self.verts[i] != x:
            raise KeyError(x)
        return i

    def has_vertex(self, x: int) -> bool:
        i = int(np.searchsorted(self.verts, x))
        return i < self.n and int(self.verts[i]) == x

    def orig_edge(self, a: int, b: int) -> tuple[int, int]:
        x, y = int(self.verts[a]), int(self.verts[b])
        return (x, y) if x < y else (y, x)

    def edges_orig(self) -> list[tuple[int, int]]:
        return list(zip(self.verts[self.eu].tolist(), self.verts[self.ev].tolist()))

    # structure ------------------------------------------------------------
    @cached_property
    def n_components(self) -> int:
        return self.n - self.m

    def components(self) -> list["Forest"]:
        if self.n_components <= 1:
            return [self]
        order, parent, pos, size = self.dfs
        out = []
        for r in np.flatnonzero(parent < 0).tolist():
            p = int(pos[r])
            mask = np.zeros(self.n, dtype=bool)
            mask[order[p : p + int(size[r])]] = True
            out.append(self.sub(mask))
        return out

    @cached_property
    def root_of(self) -> np.ndarray:
        order, parent = self.dfs[0], self.dfs[1]
        is_root = parent[order] < 0
        cid = np.cumsum(is_root) - 1
        out = np.empty(self.n, dtype=_I64)
        out[order] = order[is_root][cid]
        return out

    def _edge_mask(self, a: int, b: int) -> np.ndarray:
        lo, hi = (a, b) if a < b else (b, a)
        return ~((self.eu == lo) & (self.ev == hi))

    def minus_vertices(self, vs) -> "Forest":
        mask = np.ones(self.n, dtype=bool)
        mask[list(vs)] = False
        return self.sub(mask)

    def minus_edge(self, a: int, b: int) -> "Forest":
        return self.sub(np.ones(self.n, dtype=bool), self._edge_mask(a, b))

    def side_mask(self, a: int, b: int) -> np.ndarray:
        """Vertex mask of the component of ``a`` in F - (a, b), plus ``b``."""
        order, parent, pos, size = self.dfs
        mask = np.zeros(self.n, dtype=bool)
        if int(parent[b]) == a:
            r = int(self.root_of[a])
            pr = int(pos[r])
            mask[order[pr : pr + int(size[r])]] = True
            pb = int(pos[b])
            mask[order[pb : pb + int(size[b])]] = False
        elif int(parent[a]) == b:
            pa = int(pos[a])
            mask[order[pa : pa + int(size[a])]] = True
        else:
            raise KeyError((a, b))
        mask[b] = True
        return mask

    def side(self, a: int, b: int) -> "Forest":
        """G(i, e) for e = (a, b): the side holding a's component, with b as a leaf."""
        return self.sub(self.side_mask(a, b))

    def inner(self, a: int, b: int) -> "Forest":
        """Component of ``a`` in F - (a, b), i.e. side(a, b) minus b."""
        mask = self.side_mask(a, b)
        mask[b] = False
        return self.sub(mask)

    # matchings ------------------------------------------------------------
    @cached_property
    def beta(self) -> int:
        return int(kernels.match_forest(self.order, self.parent, -1, -1)[0])

    def max_matching(self) -> np.ndarray:
        return kernels.match_forest(self.order, self.parent, -1, -1)[1]

    def in_pi(self, a: int, b: int) -> bool:
        return int(kernels.match_forest(self.order, self.parent, a, b)[0]) == self.beta - 1

    def mate_from_edges(self, edges) -> np.ndarray:
        mate = np.full(self.n, -1, dtype=_I64)
        if len(edges):
            arr = np.asarray(edges, dtype=_I64).reshape(-1, 2)
            a = np.searchsorted(self.verts, arr[:, 0])
            b = np.searchsorted(self.verts, arr[:, 1])
            mate[a] = b
            mate[b] = a
        return mate

    def residual_beta(self, mate: np.ndarray) -> int:
        return int(kernels.residual_beta(self.order, self.parent, mate))

    @cached_property
    def lL(self) -> tuple[int, int, int]:
        b, lo, hi = kernels.lL_values(self.indptr, self.indices, self.order, self.parent)
        return int(b), int(lo), int(hi)
