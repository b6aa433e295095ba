"""Numba kernels over bit-packed adjacency matrices (uint64 words, little endian)."""

from __future__ import annotations

import numpy as np
from numba import njit

_ONE = np.uint64(1)


@njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, inline="always")
def ctz64(x):
    return popcount64((x & (~x + _ONE)) - _ONE)


@njit(cache=True, inline="always")
def has_bit(row, j):
    return (row[j >> 6] >> np.uint64(j & 63)) & _ONE


@njit(cache=True)
def color_sort(P, adj, out_v, out_c):
    """Greedy sequential coloring of the candidate set P (bitset).

    Vertices are emitted class by class in increasing color, so reading the
    output backwards visits vertices in non-increasing color. Returns the
    number of vertices written.
    """
    W = P.shape[0]
    U = P.copy()
    Q = np.empty(W, np.uint64)
    m = 0
    color = 0
    remaining = 0
    for w in range(W):
        remaining += popcount64(U[w])
    while remaining > 0:
        color += 1
        for w in range(W):
            Q[w] = U[w]
        for w in range(W):
            while Q[w]:
                b = ctz64(Q[w])
                bit = _ONE << np.uint64(b)
                v = w * 64 + b
                Q[w] &= ~bit
                U[w] &= ~bit
                row = adj[v]
                for x in range(w, W):
                    Q[x] &= ~row[x]
                out_v[m] = v
                out_c[m] = color
                m += 1
                remaining -= 1
    return m


@njit(cache=True)
def bnb_search(adj, Pst, ordv, ordc, pos, clq, depth, best, bestc, prune_at, target, max_nodes):
    """Resumable branch and bound.

    Level ``d`` holds the colored candidate list ``ordv[d, :]``; entries
    ``0 .. pos[d]-1`` are still to be branched on. ``best[0]`` is the
    incumbent size and ``prune_at`` the size a branch must beat (at least
    ``best[0]``). Returns ``(depth, nodes, status)`` with status 0 = node
    budget hit, 1 = target reached, 2 = search complete.
    """
    W = adj.shape[1]
    d = depth
    nodes = 0
    while d >= 0:
        if nodes >= max_nodes:
            return d, nodes, 0
        i = pos[d] - 1
        thr = prune_at if prune_at > best[0] else best[0]
        if i < 0 or d + ordc[d, i] <= thr:
            pos[d] = 0
            d -= 1
            continue
        pos[d] = i
        v = ordv[d, i]
        Pst[d, v >> 6] &= ~(_ONE << np.uint64(v & 63))
        clq[d] = v
        empty = True
        row = adj[v]
        for w in range(W):
            x = Pst[d, w] & row[w]
            Pst[d + 1, w] = x
            if x:
                empty = False
        nodes += 1
        if empty:
            if d + 1 > best[0]:
                best[0] = d + 1
                for j in range(d + 1):
                    bestc[j] = clq[j]
                if best[0] >= target:
                    return d, nodes, 1
        else:
            pos[d + 1] = color_sort(Pst[d + 1], adj, ordv[d + 1], ordc[d + 1])
            d += 1
    return d, nodes, 2


@njit(cache=True)
def local_search(adj, n, steps, seed, tabu_len, target, start):
    """Randomized add/swap/drop plateau search with a short tabu list.

    Starts from the clique marked in ``start`` and returns the best clique
    seen as a boolean membership vector.
    """
    np.random.seed(seed)
    in_c = np.zeros(n, np.bool_)
    miss = np.zeros(n, np.int64)
    tabu = np.zeros(n, np.int64)
    size = 0
    for v in range(n):
        if start[v]:
            in_c[v] = True
            size += 1
            row = adj[v]
            for u in range(n):
                if u != v and not has_bit(row, u):
                    miss[u] += 1
    best = size
    best_set = in_c.copy()
    if n == 0 or best >= target:
        return best_set
    for step in range(1, steps + 1):
        cand = -1
        cnt = 0
        for v in range(n):
            if not in_c[v] and miss[v] == 0 and tabu[v] < step:
                cnt += 1
                if np.random.randint(cnt) == 0:
                    cand = v
        if cand >= 0:
            in_c[cand] = True
            size += 1
            row = adj[cand]
            for u in range(n):
                if u != cand and not has_bit(row, u):
                    miss[u] += 1
            if size > best:
                best = size
                best_set[:] = in_c
                if best >= target:
                    return best_set
            continue
        cand = -1
        cnt = 0
        for v in range(n):
            if not in_c[v] and miss[v] == 1 and tabu[v] < step:
                cnt += 1
                if np.random.randint(cnt) == 0:
                    cand = v
        if cand >= 0:
            out = -1
            row = adj[cand]
            for u in range(n):
                if in_c[u] and not has_bit(row, u):
                    out = u
                    break
            in_c[out] = False
            size -= 1
            orow = adj[out]
            for u in range(n):
                if u != out and not has_bit(orow, u):
                    miss[u] -= 1
            tabu[out] = step + tabu_len
            in_c[cand] = True
            size += 1
            for u in range(n):
                if u != cand and not has_bit(row, u):
                    miss[u] += 1
            continue
        out = -1
        cnt = 0
        for u in range(n):
            if in_c[u]:
                cnt += 1
                if np.random.randint(cnt) == 0:
                    out = u
        if out < 0:
            continue
        in_c[out] = False
        size -= 1
        orow = adj[out]
        for u in range(n):
            if u != out and not has_bit(orow, u):
                miss[u] -= 1
        tabu[out] = step + tabu_len
    return best_set


@njit(cache=True)
def degeneracy_order(adj, n):
    """Repeatedly remove a minimum-degree vertex; returns removal order reversed."""
    W = adj.shape[1]
    deg = np.zeros(n, np.int64)
    for v in range(n):
        c = 0
        for w in range(W):
            c += popcount64(adj[v, w])
        deg[v] = c
    alive = np.ones(n, np.bool_)
    order = np.empty(n, np.int64)
    for t in range(n):
        best = -1
        for v in range(n):
            if alive[v] and (best < 0 or deg[v] < deg[best]):
                best = v
        order[n - 1 - t] = best
        alive[best] = False
        row = adj[best]
        for w in range(W):
            x = row[w]
            while x:
                b = ctz64(x)
                x &= ~(_ONE << np.uint64(b))
                u = w * 64 + b
                if alive[u]:
                    deg[u] -= 1
    return order
