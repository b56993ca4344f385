# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled forest kernels; same signatures and results as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.int64_t i64

cdef i64 NONE = (1 << 62)


def _arr(x):
    return np.ascontiguousarray(x, dtype=np.int64)


def build_csr(Py_ssize_t n, eu, ev):
    cdef i64[::1] a = _arr(eu)
    cdef i64[::1] b = _arr(ev)
    cdef Py_ssize_t m = a.shape[0], i
    indptr_a = np.zeros(n + 1, dtype=np.int64)
    indices_a = np.empty(2 * m, dtype=np.int64)
    cdef i64[::1] ip = indptr_a
    cdef i64[::1] ix = indices_a
    cdef i64[::1] fill = np.empty(max(n, 1), dtype=np.int64)
    for i in range(m):
        ip[a[i] + 1] += 1
        ip[b[i] + 1] += 1
    for i in range(n):
        ip[i + 1] += ip[i]
        fill[i] = ip[i]
    # smaller neighbours first: edges arrive sorted by (eu, ev)
    for i in range(m):
        ix[fill[b[i]]] = a[i]
        fill[b[i]] += 1
    for i in range(m):
        ix[fill[a[i]]] = b[i]
        fill[a[i]] += 1
    return indptr_a, indices_a


def dfs_preorder(Py_ssize_t n, indptr, indices):
    cdef i64[::1] ip = _arr(indptr)
    cdef i64[::1] ix = _arr(indices)
    order_a = np.empty(n, dtype=np.int64)
    parent_a = np.full(n, -1, dtype=np.int64)
    pos_a = np.empty(n, dtype=np.int64)
    size_a = np.ones(n, dtype=np.int64)
    cdef i64[::1] order = order_a
    cdef i64[::1] parent = parent_a
    cdef i64[::1] pos = pos_a
    cdef i64[::1] size = size_a
    cdef cnp.uint8_t[::1] seen = np.zeros(n, dtype=np.uint8)
    cdef i64[::1] stack = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t top, cnt = 0, root, i
    cdef i64 v, w, k, p
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = 1
        top = 0
        stack[top] = root
        top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            order[cnt] = v
            cnt += 1
            k = ip[v + 1] - 1
            while k >= ip[v]:
                w = ix[k]
                if not seen[w]:
                    seen[w] = 1
                    parent[w] = v
                    stack[top] = w
                    top += 1
                k -= 1
    for i in range(n):
        pos[order[i]] = i
    for i in range(n - 1, -1, -1):
        v = order[i]
        p = parent[v]
        if p >= 0:
            size[p] += size[v]
    return order_a, parent_a, pos_a, size_a


cdef i64 _residual(i64[::1] order, i64[::1] parent, i64[::1] fmate, i64 skip_a, i64 skip_b,
                   i64[::1] mate):
    cdef Py_ssize_t n = order.shape[0], i
    cdef i64 v, p, size = 0
    for i in range(n):
        mate[i] = -1
    for i in range(n - 1, -1, -1):
        v = order[i]
        p = parent[v]
        if p < 0 or v == skip_a or v == skip_b or p == skip_a or p == skip_b:
            continue
        if fmate.shape[0] > 0 and fmate[v] == p:
            continue
        if mate[v] < 0 and mate[p] < 0:
            mate[v] = p
            mate[p] = v
            size += 1
    return size


def match_forest(order, parent, i64 skip_a=-1, i64 skip_b=-1):
    o = _arr(order)
    mate = np.empty(o.shape[0], dtype=np.int64)
    cdef i64[::1] empty = np.empty(0, dtype=np.int64)
    size = _residual(o, _arr(parent), empty, skip_a, skip_b, mate)
    return int(size), mate


def residual_match(order, parent, fmate, i64 skip_a=-1, i64 skip_b=-1):
    o = _arr(order)
    mate = np.empty(o.shape[0], dtype=np.int64)
    size = _residual(o, _arr(parent), _arr(fmate), skip_a, skip_b, mate)
    return int(size), mate


def residual_beta(order, parent, fmate):
    return residual_match(order, parent, fmate)[0]


cdef i64 _dp_pass(i64[::1] ip, i64[::1] ix, i64[::1] order, i64[::1] parent, i64 sign, i64 K):
    # The infeasible marker must dominate every finite value (|value| < 2n^2) while n copies of it
    # still fit in int64; a fixed -2^60 overflows once a vertex has eight leaf children.
    cdef Py_ssize_t n = order.shape[0], i
    cdef i64 NEG = -4 * (n + 2) * (n + 2)
    cdef i64[:, ::1] W = np.empty((max(n, 1), 4), dtype=np.int64)
    cdef i64 total = 0
    cdef i64 v, p, c, k, s0, sa, pen1, pen2, pid1, gain, b0, b1, ba, m0, pen, g, other, cand
    cdef i64 a0, a1, b0v, b1v, best
    for i in range(n - 1, -1, -1):
        v = order[i]
        p = parent[v]
        s0 = 0
        sa = 0
        pen1 = NONE
        pen2 = NONE
        pid1 = -1
        gain = NONE
        for k in range(ip[v], ip[v + 1]):
            c = ix[k]
            if c == p:
                continue
            b0 = max(W[c, 0], W[c, 2])
            b1 = max(W[c, 1], W[c, 3])
            ba = max(b0, b1)
            m0 = max(W[c, 0], W[c, 1])
            s0 += b0
            sa += ba
            if b1 > NEG // 2:
                pen = ba - b1
                if pen1 == NONE or pen < pen1:
                    pen2 = pen1
                    pen1 = pen
                    pid1 = c
                elif pen2 == NONE or pen < pen2:
                    pen2 = pen
            g = m0 - b0
            if gain == NONE or g > gain:
                gain = g
        a1 = s0
        a0 = sa - pen1 + sign if pen1 != NONE else NEG
        b1v = s0 + gain + K if gain != NONE else NEG
        b0v = NEG
        for k in range(ip[v], ip[v + 1]):
            c = ix[k]
            if c == p:
                continue
            other = pen2 if c == pid1 else pen1
            if other == NONE:
                continue
            b0 = max(W[c, 0], W[c, 2])
            b1 = max(W[c, 1], W[c, 3])
            ba = max(b0, b1)
            m0 = max(W[c, 0], W[c, 1])
            cand = K + sign + sa - ba + m0 - other
            if cand > b0v:
                b0v = cand
        W[v, 0] = a0
        W[v, 1] = a1
        W[v, 2] = b0v
        W[v, 3] = b1v
        if p < 0:
            best = max(max(a0, a1), max(b0v, b1v))
            total += best
    return total


def _decode(value, sign, K):
    if sign < 0:
        f = -((-value) // K)
        return f, K * f - value
    f = value // K
    return f, value - K * f


def lL_values(indptr, indices, order, parent):
    ip, ix, o, par = _arr(indptr), _arr(indices), _arr(order), _arr(parent)
    K = o.shape[0] + 1
    beta_lo, lo = _decode(_dp_pass(ip, ix, o, par, -1, K), -1, K)
    beta_hi, hi = _decode(_dp_pass(ip, ix, o, par, 1, K), 1, K)
    if beta_lo != beta_hi:
        raise AssertionError("dynamic program disagrees on matching size")
    return beta_lo, lo, hi


def peel(Py_ssize_t n, indptr, indices, alive=None):
    cdef i64[::1] ip = _arr(indptr)
    cdef i64[::1] ix = _arr(indices)
    al_a = np.ones(n, dtype=np.uint8) if alive is None else np.asarray(alive, dtype=np.uint8)
    cdef cnp.uint8_t[::1] al = al_a
    cdef i64[::1] deg = np.zeros(max(n, 1), dtype=np.int64)
    k_a = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] k = k_a
    cdef cnp.uint8_t[::1] queued = np.zeros(max(n, 1), dtype=np.uint8)
    cdef Py_ssize_t v, j
    cdef i64 w, level = 0
    for v in range(n):
        if al[v]:
            for j in range(ip[v], ip[v + 1]):
                if al[ix[j]]:
                    deg[v] += 1
    cur = [v for v in range(n) if al[v] and deg[v] <= 1]
    for v in cur:
        queued[v] = 1
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
                        queued[w] = 1
                        nxt.append(w)
        nxt.sort()
        cur = nxt
        level += 1
    return k_a


def elementary_scan(order, parent, cands, req_a, req_b, bint maximize):
    cdef i64[::1] o = _arr(order)
    cdef i64[::1] par = _arr(parent)
    cdef i64[::1] cs = _arr(cands)
    cdef i64[::1] ra = _arr(req_a)
    cdef i64[::1] rb = _arr(req_b)
    cdef Py_ssize_t n = o.shape[0], i, r
    cdef i64[::1] mate = np.empty(max(n, 1), dtype=np.int64)
    cdef i64[::1] rmate = np.empty(max(n, 1), dtype=np.int64)
    cdef i64[::1] empty = np.empty(0, dtype=np.int64)
    cdef i64 x, size, val, best_x = -1, best_v = 0, valid = 0, failed = 0
    cdef bint ok
    for i in range(cs.shape[0]):
        x = cs[i]
        size = _residual(o, par, empty, x, -1, mate)
        if 2 * size != n - 1:
            failed += 1
            continue
        ok = True
        for r in range(ra.shape[0]):
            if mate[ra[r]] != rb[r]:
                ok = False
                break
        if not ok:
            continue
        valid += 1
        val = _residual(o, par, mate, -1, -1, rmate)
        if best_x < 0 or (val > best_v if maximize else val < best_v):
            best_x = x
            best_v = val
    return int(best_x), int(best_v), int(valid), int(failed)


def alternate_swap(order, parent, fmate, i64 leaf, i64 support):
    cdef i64[::1] o = _arr(order)
    fm_a = _arr(fmate)
    cdef i64[::1] fm = fm_a
    cdef Py_ssize_t n = o.shape[0]
    hm_a = np.empty(n, dtype=np.int64)
    cdef i64[::1] hm = hm_a
    _residual(o, _arr(parent), fm, leaf, support, hm)
    hm[leaf] = support
    hm[support] = leaf
    new_a = fm_a.copy()
    cdef i64[::1] new = new_a
    cdef i64 x = leaf, y, z
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
    return new_a
