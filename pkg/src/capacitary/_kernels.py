"""Compiled inner loops over Morton-ordered blocks.

A dyadic cube of depth ``d`` below its own level is a contiguous block of
``2**(n*d)`` cells in Morton order. ``w[j]`` is the cover weight of a cube ``j``
levels below the block root, so ``w[0]`` belongs to the block itself and
``w[d]`` to a single cell. Node costs are stored level by level in one flat
array; the children of node ``p`` at level ``j`` are ``(p << n) + c`` at level
``j + 1``, summed in increasing ``c``.
"""

import numpy as np
from numba import njit

GOLDEN = 0.3819660112501051


@njit(cache=True)
def _offsets(n, d):
    offs = np.empty(d + 2, np.int64)
    offs[0] = 0
    for k in range(d + 1):
        offs[k + 1] = offs[k] + (1 << (n * k))
    return offs


@njit(cache=True)
def batch_costs(member, n, w):
    """Minimal-cover cost of every node for one leaf set (bottom-up)."""
    d = w.shape[0] - 1
    offs = _offsets(n, d)
    cost = np.zeros(offs[d + 1])
    fan = 1 << n
    for p in range(member.shape[0]):
        if member[p]:
            cost[offs[d] + p] = w[d]
    for k in range(d - 1, -1, -1):
        for p in range(1 << (n * k)):
            base = offs[k + 1] + (p << n)
            s = cost[base]
            for c in range(1, fan):
                s += cost[base + c]
            cost[offs[k] + p] = min(w[k], s)
    return cost


@njit(cache=True)
def sweep(vals, mask, n, w):
    """Layer contents of a block by a decreasing-threshold sweep.

    Returns the distinct positive values ``ts`` (ascending) of ``vals`` on the
    masked cells and ``H[j]``, the dyadic content of ``{vals >= ts[j]}``.
    Each added cell refreshes its ancestors from their children, so every
    recorded content equals the bottom-up DP of that superlevel set exactly.
    """
    d = w.shape[0] - 1
    offs = _offsets(n, d)
    cost = np.zeros(offs[d + 1])
    fan = 1 << n
    cnt = 0
    for i in range(vals.shape[0]):
        if mask[i] and vals[i] > 0.0:
            cnt += 1
    idx = np.empty(cnt, np.int64)
    v = np.empty(cnt)
    j = 0
    for i in range(vals.shape[0]):
        if mask[i] and vals[i] > 0.0:
            idx[j] = i
            v[j] = -vals[i]
            j += 1
    order = np.argsort(v, kind="mergesort")
    ts = np.empty(cnt)
    H = np.empty(cnt)
    m = 0
    i = 0
    while i < cnt:
        t = -v[order[i]]
        while i < cnt and -v[order[i]] == t:
            p = idx[order[i]]
            cost[offs[d] + p] = w[d]
            for k in range(d - 1, -1, -1):
                p >>= n
                base = offs[k + 1] + (p << n)
                s = cost[base]
                for c in range(1, fan):
                    s += cost[base + c]
                new = min(w[k], s)
                if new == cost[offs[k] + p]:
                    break
                cost[offs[k] + p] = new
            i += 1
        ts[m] = t
        H[m] = cost[0]
        m += 1
    out_t = np.empty(m)
    out_h = np.empty(m)
    for q in range(m):
        out_t[q] = ts[m - 1 - q]
        out_h[q] = H[m - 1 - q]
    return out_t, out_h


@njit(cache=True)
def layer_sum(ts, H):
    total = 0.0
    prev = 0.0
    for j in range(ts.shape[0]):
        total += (ts[j] - prev) * H[j]
        prev = ts[j]
    return total


@njit(cache=True)
def choquet_block(vals, mask, n, w):
    ts, H = sweep(vals, mask, n, w)
    return layer_sum(ts, H)


@njit(cache=True)
def level_profiles(vals, n, L, k, W):
    """Profiles of every dyadic cube at level ``k``; rows padded to equal length.

    Padding repeats the last threshold with zero content so padded layers add
    nothing to any layer-cake sum.
    """
    K = 1 << (n * k)
    size = 1 << (n * (L - k))
    w = W[k:]
    mask = np.ones(size, np.bool_)
    tss = []
    hss = []
    width = 1
    for q in range(K):
        ts, H = sweep(vals[q * size:(q + 1) * size], mask, n, w)
        tss.append(ts)
        hss.append(H)
        if ts.shape[0] > width:
            width = ts.shape[0]
    T = np.zeros((K, width))
    Hm = np.zeros((K, width))
    counts = np.zeros(K, np.int64)
    for q in range(K):
        c = tss[q].shape[0]
        counts[q] = c
        last = 0.0
        for j in range(c):
            T[q, j] = tss[q][j]
            Hm[q, j] = hss[q][j]
            last = tss[q][j]
        for j in range(c, width):
            T[q, j] = last
    return T, Hm, counts


@njit(cache=True)
def _shifted_integral(vals, mask, n, w, c, p):
    g = np.empty(vals.shape[0])
    for i in range(vals.shape[0]):
        x = abs(vals[i] - c)
        g[i] = x if p == 1.0 else x**p
    return choquet_block(g, mask, n, w)


@njit(cache=True)
def oscillation(vals, mask, n, w, p, full_scan):
    """Minimize ``c -> integral of |vals - c|^p`` over the masked cells.

    The discrete minimizer over the distinct data values is located either by
    a full scan or by bisection on the sign of consecutive differences; ties
    go to the smallest value. A golden-section search on the bracketing
    interval then looks for a strictly better interior constant.

    Returns ``(value, c_star, interior, scan_value)``.
    """
    cnt = 0
    for i in range(vals.shape[0]):
        if mask[i]:
            cnt += 1
    data = np.empty(cnt)
    j = 0
    for i in range(vals.shape[0]):
        if mask[i]:
            data[j] = vals[i]
            j += 1
    u = np.unique(data)
    M = u.shape[0]
    if M == 1:
        return 0.0, u[0], False, 0.0
    phis = np.full(M, np.nan)
    if full_scan:
        for q in range(M):
            phis[q] = _shifted_integral(vals, mask, n, w, u[q], p)
        best = 0
        for q in range(1, M):
            if phis[q] < phis[best] - 1e-13 * abs(phis[best]):
                best = q
    else:
        lo = 0
        hi = M - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if np.isnan(phis[mid]):
                phis[mid] = _shifted_integral(vals, mask, n, w, u[mid], p)
            if np.isnan(phis[mid + 1]):
                phis[mid + 1] = _shifted_integral(vals, mask, n, w, u[mid + 1], p)
            a = phis[mid]
            b = phis[mid + 1]
            if b - a >= -1e-13 * max(abs(a), abs(b)):
                hi = mid
            else:
                lo = mid + 1
        best = lo
        if np.isnan(phis[best]):
            phis[best] = _shifted_integral(vals, mask, n, w, u[best], p)
    scan_val = phis[best]
    a = u[max(best - 1, 0)]
    b = u[min(best + 1, M - 1)]
    x1 = a + GOLDEN * (b - a)
    x2 = b - GOLDEN * (b - a)
    f1 = _shifted_integral(vals, mask, n, w, x1, p)
    f2 = _shifted_integral(vals, mask, n, w, x2, p)
    tol = 1e-13 * (abs(a) + abs(b)) + 1e-300
    for _ in range(200):
        if b - a <= tol:
            break
        if f1 <= f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = a + GOLDEN * (b - a)
            f1 = _shifted_integral(vals, mask, n, w, x1, p)
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = b - GOLDEN * (b - a)
            f2 = _shifted_integral(vals, mask, n, w, x2, p)
    if f1 <= f2:
        cg = x1
        fg = f1
    else:
        cg = x2
        fg = f2
    if fg < scan_val - 1e-12 * abs(scan_val):
        return fg, cg, True, scan_val
    return scan_val, u[best], False, scan_val


@njit(cache=True)
def level_oscillations(vals, n, L, k, W, p, full_scan):
    K = 1 << (n * k)
    size = 1 << (n * (L - k))
    w = W[k:]
    mask = np.ones(size, np.bool_)
    value = np.empty(K)
    cstar = np.empty(K)
    interior = np.zeros(K, np.bool_)
    for q in range(K):
        v, c, it, _ = oscillation(vals[q * size:(q + 1) * size], mask, n, w, p, full_scan)
        value[q] = v
        cstar[q] = c
        interior[q] = it
    return value, cstar, interior
