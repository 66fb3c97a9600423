"""Compiled inner loops for clique search over 256-bit vertex sets.

A vertex set is a length-4 uint64 array; bit ``i`` of the concatenation is
root ``i``. All kernels release the GIL so branches can run on threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NW = 4
MAXD = 242

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit(inline="always", cache=True)
def _pc64(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(inline="always", cache=True)
def _popcount(s):
    return int(_pc64(s[0]) + _pc64(s[1]) + _pc64(s[2]) + _pc64(s[3]))


@njit(inline="always", cache=True)
def _empty(s):
    return s[0] == _ZERO and s[1] == _ZERO and s[2] == _ZERO and s[3] == _ZERO


@njit(inline="always", cache=True)
def _lowest(s):
    """Index of the lowest set bit, or -1."""
    for w in range(NW):
        x = s[w]
        if x != _ZERO:
            low = x & (~x + _ONE)
            return 64 * w + int(_pc64(low - _ONE))
    return -1


@njit(inline="always", cache=True)
def _clear(s, v):
    s[v >> 6] &= ~(_ONE << np.uint64(v & 63))


@njit(inline="always", cache=True)
def _set(s, v):
    s[v >> 6] |= _ONE << np.uint64(v & 63)


@njit(cache=True)
def _pivot(adj, P, X):
    best = -1
    best_n = -1
    for src in range(2):
        S = P if src == 0 else X
        for w in range(NW):
            x = S[w]
            while x != _ZERO:
                low = x & (~x + _ONE)
                u = 64 * w + int(_pc64(low - _ONE))
                x ^= low
                n = int(
                    _pc64(P[0] & adj[u, 0])
                    + _pc64(P[1] & adj[u, 1])
                    + _pc64(P[2] & adj[u, 2])
                    + _pc64(P[3] & adj[u, 3])
                )
                if n > best_n:
                    best_n = n
                    best = u
    return best


@njit(nogil=True, cache=True)
def bk_maximal(adj, P0, X0, r0, min_size, hist, lo, hi, out, budget):
    """Bron-Kerbosch with pivoting below a fixed partial clique of size r0.

    Every maximal clique of size >= min_size is counted in ``hist``; those with
    size in [lo, hi] have their new vertices written to ``out`` while capacity
    lasts. Returns (nodes, written, aborted).
    """
    P = np.zeros((MAXD, NW), dtype=np.uint64)
    X = np.zeros((MAXD, NW), dtype=np.uint64)
    C = np.zeros((MAXD, NW), dtype=np.uint64)
    R = np.zeros(MAXD, dtype=np.int64)
    cap = out.shape[0]
    width = out.shape[1]
    nodes = 0
    nout = 0
    for w in range(NW):
        P[0, w] = P0[w]
        X[0, w] = X0[w]
    if _empty(P[0]):
        if _empty(X[0]) and r0 >= min_size:
            hist[r0] += 1
            if lo <= r0 <= hi and nout < cap:
                nout += 1
        return nodes, nout, False
    if r0 + _popcount(P[0]) < min_size:
        return nodes, nout, False
    piv = _pivot(adj, P[0], X[0])
    for w in range(NW):
        C[0, w] = P[0, w] & ~adj[piv, w]
    lvl = 0
    while lvl >= 0:
        v = _lowest(C[lvl])
        if v < 0:
            lvl -= 1
            continue
        _clear(C[lvl], v)
        R[lvl] = v
        nl = lvl + 1
        for w in range(NW):
            P[nl, w] = P[lvl, w] & adj[v, w]
            X[nl, w] = X[lvl, w] & adj[v, w]
        _clear(P[lvl], v)
        _set(X[lvl], v)
        nodes += 1
        if budget >= 0 and nodes > budget:
            return nodes, nout, True
        size = r0 + nl
        if _empty(P[nl]):
            if _empty(X[nl]) and size >= min_size:
                hist[size] += 1
                if lo <= size <= hi and nout < cap and nl <= width:
                    for j in range(nl):
                        out[nout, j] = R[j]
                    nout += 1
            continue
        if size + _popcount(P[nl]) < min_size:
            continue
        piv = _pivot(adj, P[nl], X[nl])
        for w in range(NW):
            C[nl, w] = P[nl, w] & ~adj[piv, w]
        lvl = nl
    return nodes, nout, False


@njit(nogil=True, cache=True)
def k_cliques(adj, P0, kmax, counts, collect_k, out):
    """Count cliques of every size up to kmax inside the candidate set P0.

    ``counts[d]`` receives the number of d-subsets of P0 that are cliques;
    the d = collect_k ones are written to ``out`` while capacity lasts.
    """
    P = np.zeros((MAXD, NW), dtype=np.uint64)
    R = np.zeros(MAXD, dtype=np.int64)
    cap = out.shape[0]
    nout = 0
    for w in range(NW):
        P[0, w] = P0[w]
    lvl = 0
    while lvl >= 0:
        v = _lowest(P[lvl])
        if v < 0:
            lvl -= 1
            continue
        _clear(P[lvl], v)
        R[lvl] = v
        nl = lvl + 1
        counts[nl] += 1
        if nl == collect_k and nout < cap:
            for j in range(nl):
                out[nout, j] = R[j]
            nout += 1
        if nl < kmax:
            for w in range(NW):
                P[nl, w] = P[lvl, w] & adj[v, w]
            if not _empty(P[nl]):
                lvl = nl
    return nout
