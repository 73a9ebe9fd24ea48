"""Compiled inner loops for :class:`~spreadlab.permcore.ElementIndex`.

Arrays: ``U``/``Uinv`` are (levels, max_orbit, degree) transversal tables,
``pos`` maps (level, point) to orbit position or -1, ``radix`` and ``sizes``
describe the mixed-radix rank.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _unrank_one(r, g, U, sizes, radix):
    k = sizes.shape[0]
    n = g.shape[0]
    j = (r // radix[k - 1]) % sizes[k - 1]
    for p in range(n):
        g[p] = U[k - 1, j, p]
    for i in range(k - 2, -1, -1):
        j = (r // radix[i]) % sizes[i]
        for p in range(n):
            g[p] = U[i, j, g[p]]


@njit(cache=True)
def _rank_one(tmp, Uinv, pos, base, radix, check):
    k = base.shape[0]
    n = tmp.shape[0]
    rr = 0
    for i in range(k):
        j = pos[i, tmp[base[i]]]
        if j < 0:
            return -1
        rr += j * radix[i]
        for p in range(n):
            tmp[p] = Uinv[i, j, tmp[p]]
    if check:
        for p in range(n):
            if tmp[p] != p:
                return -1
    return rr


@njit(cache=True)
def unrank_many(ranks, U, sizes, radix, n):
    out = np.empty((ranks.shape[0], n), dtype=np.int32)
    g = np.empty(n, dtype=np.int32)
    if sizes.shape[0] == 0:
        for t in range(ranks.shape[0]):
            for p in range(n):
                out[t, p] = p
        return out
    for t in range(ranks.shape[0]):
        _unrank_one(ranks[t], g, U, sizes, radix)
        for p in range(n):
            out[t, p] = g[p]
    return out


@njit(cache=True)
def rank_many(P, Uinv, pos, base, radix, check):
    m, n = P.shape
    out = np.empty(m, dtype=np.int64)
    tmp = np.empty(n, dtype=np.int32)
    for t in range(m):
        for p in range(n):
            tmp[p] = P[t, p]
        out[t] = _rank_one(tmp, Uinv, pos, base, radix, check)
    return out


@njit(cache=True)
def transform_ranks(ranks, L, R, U, Uinv, pos, base, sizes, radix):
    """Ranks of ``L * x * R`` (left-to-right product) for each rank ``x``."""
    n = L.shape[0]
    out = np.empty(ranks.shape[0], dtype=np.int64)
    g = np.empty(n, dtype=np.int32)
    tmp = np.empty(n, dtype=np.int32)
    k = sizes.shape[0]
    for t in range(ranks.shape[0]):
        if k == 0:
            out[t] = 0
            continue
        _unrank_one(ranks[t], g, U, sizes, radix)
        for p in range(n):
            tmp[p] = R[g[L[p]]]
        out[t] = _rank_one(tmp, Uinv, pos, base, radix, False)
    return out


@njit(cache=True)
def product_ranks(ranks_a, ranks_b, U, Uinv, pos, base, sizes, radix, n):
    """Ranks of ``a * b`` for paired rank arrays."""
    out = np.empty(ranks_a.shape[0], dtype=np.int64)
    ga = np.empty(n, dtype=np.int32)
    gb = np.empty(n, dtype=np.int32)
    tmp = np.empty(n, dtype=np.int32)
    for t in range(ranks_a.shape[0]):
        _unrank_one(ranks_a[t], ga, U, sizes, radix)
        _unrank_one(ranks_b[t], gb, U, sizes, radix)
        for p in range(n):
            tmp[p] = gb[ga[p]]
        out[t] = _rank_one(tmp, Uinv, pos, base, radix, False)
    return out


@njit(cache=True)
def first_column_min(ranks, labels, k, U, sizes, radix, n, theta):
    """Per label, the smallest value of ``(x*theta)[0]``."""
    best = np.full(k, 1 << 30, dtype=np.int64)
    g = np.empty(n, dtype=np.int32)
    col = np.empty(ranks.shape[0], dtype=np.int64)
    for t in range(ranks.shape[0]):
        _unrank_one(ranks[t], g, U, sizes, radix)
        v = theta[g[0]]
        col[t] = v
        if v < best[labels[t]]:
            best[labels[t]] = v
    return best, col


@njit(cache=True)
def pair_generates(mult, a, b):
    """Whether ranks ``a`` and ``b`` generate the whole group (table mode).

    The closure stops as soon as it exceeds half the group, since a proper
    subgroup has at most |G|/2 elements.
    """
    N = mult.shape[0]
    seen = np.zeros(N, dtype=np.bool_)
    stack = np.empty(N, dtype=np.int64)
    seen[0] = True
    stack[0] = 0
    top = 1
    count = 1
    half = N // 2
    if count > half:
        return True
    while top > 0:
        top -= 1
        x = stack[top]
        y = mult[x, a]
        if not seen[y]:
            seen[y] = True
            stack[top] = y
            top += 1
            count += 1
        y = mult[x, b]
        if not seen[y]:
            seen[y] = True
            stack[top] = y
            top += 1
            count += 1
        if count > half:
            return True
    return count == N


@njit(cache=True)
def nongenerating_row(mult, a, zs):
    out = np.empty(zs.shape[0], dtype=np.bool_)
    for t in range(zs.shape[0]):
        out[t] = not pair_generates(mult, a, zs[t])
    return out


@njit(cache=True)
def closure(mult, gens):
    """Boolean membership mask of the subgroup generated by ``gens``."""
    N = mult.shape[0]
    seen = np.zeros(N, dtype=np.bool_)
    stack = np.empty(N, dtype=np.int64)
    seen[0] = True
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        x = stack[top]
        for g in gens:
            y = mult[x, g]
            if not seen[y]:
                seen[y] = True
                stack[top] = y
                top += 1
    return seen


@njit(cache=True)
def closure_size(G, U, Uinv, pos, base, sizes, radix, order, limit):
    """Size of the subgroup generated by the rows of ``G`` (image arrays),
    enumerated through element ranks; stops once it exceeds ``limit``."""
    m, n = G.shape
    seen = np.zeros(order, dtype=np.bool_)
    stack = np.empty(order, dtype=np.int64)
    seen[0] = True
    stack[0] = 0
    top = 1
    count = 1
    g = np.empty(n, dtype=np.int32)
    tmp = np.empty(n, dtype=np.int32)
    while top > 0:
        top -= 1
        _unrank_one(stack[top], g, U, sizes, radix)
        for s in range(m):
            for p in range(n):
                tmp[p] = G[s, g[p]]
            r = _rank_one(tmp, Uinv, pos, base, radix, False)
            if not seen[r]:
                seen[r] = True
                stack[top] = r
                top += 1
                count += 1
                if count > limit:
                    return count
    return count
