"""Pure-Python forest kernels.

Every routine works on a forest given in local CSR form (``indptr``,
``indices``) together with a DFS preorder (``order``) and parent array.
Edges of a forest are exactly the (v, parent[v]) pairs, which lets vertex
and edge deletions be expressed as cheap masks.  The compiled module
``_kernels`` exposes the same functions with the same semantics.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_NEG = -(1 << 60)


def _lists(*arrays):
    return [a.tolist() if isinstance(a, np.ndarray) else list(a) for a in arrays]


def build_csr(n, eu, ev):
    """CSR adjacency with ascending neighbour lists from lexicographically sorted edges (eu < ev)."""
    src = np.concatenate((ev, eu))
    dst = np.concatenate((eu, ev))
    idx = np.argsort(src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[idx].astype(np.int64)


def dfs_preorder(n, indptr, indices):
    """Return (order, parent, pos, size) for an iterative DFS over all components.

    Roots are taken in increasing local id; children are visited in increasing id.
    """
    ip, ix = _lists(indptr, indices)
    parent = [-1] * n
    seen = [False] * n
    order = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            for k in range(ip[v + 1] - 1, ip[v] - 1, -1):
                w = ix[k]
                if not seen[w]:
                    seen[w] = True
                    parent[w] = v
                    stack.append(w)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    size = [1] * n
    for v in reversed(order):
        p = parent[v]
        if p >= 0:
            size[p] += size[v]
    as_arr = lambda x: np.asarray(x, dtype=np.int64)
    return as_arr(order), as_arr(parent), as_arr(pos), as_arr(size)


def match_forest(order, parent, skip_a=-1, skip_b=-1):
    """Greedy bottom-up maximum matching of the forest minus up to two vertices.

    Returns (size, mate) with mate[v] == -1 for exposed vertices.
    """
    order, parent = _lists(order, parent)
    n = len(order)
    mate = [-1] * n
    size = 0
    for v in reversed(order):
        p = parent[v]
        if p < 0 or v == skip_a or v == skip_b or p == skip_a or p == skip_b:
            continue
        if mate[v] < 0 and mate[p] < 0:
            mate[v] = p
            mate[p] = v
            size += 1
    return size, np.asarray(mate, dtype=np.int64)


def residual_match(order, parent, fmate, skip_a=-1, skip_b=-1):
    """Maximum matching of (forest minus the matching ``fmate``) minus two vertices."""
    order, parent, fmate = _lists(order, parent, fmate)
    n = len(order)
    mate = [-1] * n
    size = 0
    for v in reversed(order):
        p = parent[v]
        if p < 0 or fmate[v] == p or v == skip_a or v == skip_b or p == skip_a or p == skip_b:
            continue
        if mate[v] < 0 and mate[p] < 0:
            mate[v] = p
            mate[p] = v
            size += 1
    return size, np.asarray(mate, dtype=np.int64)


def residual_beta(order, parent, fmate):
    return residual_match(order, parent, fmate)[0]


def _dp_pass(ip, ix, order, parent, sign, K):
    n = len(order)
    W = [None] * n
    total = 0
    for v in reversed(order):
        p = parent[v]
        s0 = 0
        sa = 0
        pen1 = pen2 = None
        pid1 = -1
        gain_b1 = None
        kids = []
        for k in range(ip[v], ip[v + 1]):
            c = ix[k]
            if c == p:
                continue
            w00, w01, w10, w11 = W[c]
            b0 = max(w00, w10)
            b1 = max(w01, w11)
            ba = max(b0, b1)
            m0 = max(w00, w01)
            s0 += b0
            sa += ba
            pen = ba - b1 if b1 > _NEG // 2 else None
            if pen is not None:
                if pen1 is None or pen < pen1:
                    pen2 = pen1
                    pen1, pid1 = pen, c
                elif pen2 is None or pen < pen2:
                    pen2 = pen
            g = m0 - b0
            if gain_b1 is None or g > gain_b1:
                gain_b1 = g
            kids.append((c, m0, ba))
        a1 = s0
        a0 = sa - pen1 + sign if pen1 is not None else _NEG
        b1v = s0 + gain_b1 + K if gain_b1 is not None else _NEG
        b0v = _NEG
        for c, m0, ba in kids:
            other = pen2 if c == pid1 else pen1
            if other is None:
                continue
            cand = K + sign + sa - ba + m0 - other
            if cand > b0v:
                b0v = cand
        W[v] = (a0, a1, b0v, b1v)
        if p < 0:
            total += max(W[v])
    return total


def _decode(value, sign, K):
    if sign < 0:
        f = -((-value) // K)
        return f, K * f - value
    f = value // K
    return f, value - K * f


def lL_values(indptr, indices, order, parent):
    """Return (beta, l, L) of a forest by a linear dynamic program.

    Each vertex keeps four states: whether the chosen maximum matching F
    pairs it with a child, and whether it stays free in the greedy residual
    matching of its subtree.  The objective |F|*K -/+ beta(residual) with
    K > n makes |F| dominate, so optimal states are maximum matchings.
    """
    ip, ix, order, parent = _lists(indptr, indices, order, parent)
    n = len(order)
    K = n + 1
    beta_lo, lo = _decode(_dp_pass(ip, ix, order, parent, -1, K), -1, K)
    beta_hi, hi = _decode(_dp_pass(ip, ix, order, parent, 1, K), 1, K)
    if beta_lo != beta_hi:
        raise AssertionError("dynamic program disagrees on matching size")
    return beta_lo, lo, hi


def peel(n, indptr, indices, alive=None):
    """Leaf-peeling levels; the last isolated remainder forms its own level."""
    ip, ix = _lists(indptr, indices)
    al = [True] * n if alive is None else [bool(x) for x in alive.tolist()]
    deg = [0] * n
    for v in range(n):
        if al[v]:
            deg[v] = sum(1 for k in range(ip[v], ip[v + 1]) if al[ix[k]])
    k = [-1] * n
    queued = [False] * n
    cur = []
    for v in range(n):
        if al[v] and deg[v] <= 1:
            cur.append(v)
            queued[v] = True
    level = 0
    while cur:
        for v in cur:
            k[v] = level
        nxt = []
        for v in cur:
            for j in range(ip[v], ip[v + 1]):
                w = ix[j]
                if al[w] and not queued[w]:
                    deg[w] -= 1
                    if deg[w] <= 1:
                        queued[w] = True
                        nxt.append(w)
        nxt.sort()
        cur = nxt
        level += 1
    return np.asarray(k, dtype=np.int64)


def elementary_scan(order, parent, cands, req_a, req_b, maximize):
    """Scan exposed-vertex candidates of an odd tree.

    For every candidate x the unique perfect matching of T - x is built; the
    candidate is kept when it contains every required edge (req_a[i], req_b[i]).
    Returns (best_x, best_value, n_valid, n_failed) where n_failed counts
    candidates without a perfect matching.
    """
    order_l, parent_l = _lists(order, parent)
    ra, rb = _lists(req_a, req_b)
    n = len(order_l)
    best_x = -1
    best_v = 0
    valid = 0
    failed = 0
    for x in _lists(cands)[0]:
        size, mate = match_forest(order_l, parent_l, x, -1)
        if 2 * size != n - 1:
            failed += 1
            continue
        ml = mate.tolist()
        if any(ml[a] != b for a, b in zip(ra, rb)):
            continue
        valid += 1
        val = residual_beta(order_l, parent_l, ml)
        if best_x < 0 or (val > best_v if maximize else val < best_v):
            best_x, best_v = x, val
    return best_x, best_v, valid, failed


def alternate_swap(order, parent, fmate, leaf, support):
    """Force the pendant edge (leaf, support) into the maximum matching ``fmate``.

    A maximum matching H of the residual forest containing the edge is
    built, then the maximal path alternating between H and F starting at
    the leaf is swapped.  Returns the new mate array.
    """
    order_l, parent_l, fm = _lists(order, parent, fmate)
    _, hm = residual_match(order_l, parent_l, fm, leaf, support)
    hm = hm.tolist()
    hm[leaf] = support
    hm[support] = leaf
    new = list(fm)
    x = leaf
    while True:
        y = hm[x]
        if y < 0:
            break
        z = fm[y]
        new[x] = y
        new[y] = x
        if z < 0:
            raise AssertionError("alternating path ends on an exposed vertex")
        if new[z] == y:
            new[z] = -1
        x = z
        if hm[x] < 0:
            break
    return np.asarray(new, dtype=np.int64)
