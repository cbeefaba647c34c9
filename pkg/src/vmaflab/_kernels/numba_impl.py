"""numba-compiled loop versions of the hot kernels.

Same contracts as :mod:`numpy_impl`; results agree to floating-point
round-off, not bit-for-bit.
"""

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True, inline="always")
def _reflect(i, n):
    m = i % (2 * n)
    if m >= n:
        m = 2 * n - 1 - m
    return m


@njit(cache=True, nogil=True)
def _correlate_rows(x, k):
    h, n = x.shape
    r = k.shape[0] // 2
    out = np.empty((h, n))
    row = np.empty(n + 2 * r)
    for y in range(h):
        for i in range(n + 2 * r):
            row[i] = x[y, _reflect(i - r, n)]
        for i in range(n):
            acc = 0.0
            for j in range(k.shape[0]):
                acc += k[j] * row[i + j]
            out[y, i] = acc
    return out


def correlate_rows(x, k):
    return _correlate_rows(np.ascontiguousarray(x, dtype=np.float64),
                           np.ascontiguousarray(k, dtype=np.float64))


def correlate_cols(x, k):
    xt = np.ascontiguousarray(np.asarray(x, dtype=np.float64).T)
    return np.ascontiguousarray(correlate_rows(xt, k).T)


@njit(cache=True, nogil=True)
def _dwt_rows(x, lo, hi):
    h, n = x.shape
    L = lo.shape[0]
    m = (n + L - 1) // 2
    a = np.empty((h, m))
    d = np.empty((h, m))
    for y in range(h):
        for i in range(m):
            sa = 0.0
            sd = 0.0
            for j in range(L):
                v = x[y, _reflect(2 * i + 1 - j, n)]
                sa += lo[j] * v
                sd += hi[j] * v
            a[y, i] = sa
            d[y, i] = sd
    return a, d


def dwt_rows(x, lo, hi):
    return _dwt_rows(np.ascontiguousarray(x, dtype=np.float64),
                     np.ascontiguousarray(lo, dtype=np.float64),
                     np.ascontiguousarray(hi, dtype=np.float64))


@njit(cache=True, nogil=True)
def _clahe_maps(luma, row_edges, col_edges, nbins, clip_limit):
    ny = row_edges.shape[0] - 1
    nx = col_edges.shape[0] - 1
    max_val = nbins - 1
    maps = np.empty((ny, nx, nbins))
    hist = np.empty(nbins)
    for ty in range(ny):
        for tx in range(nx):
            hist[:] = 0.0
            n_px = 0
            for y in range(row_edges[ty], row_edges[ty + 1]):
                for x in range(col_edges[tx], col_edges[tx + 1]):
                    hist[luma[y, x]] += 1.0
                    n_px += 1
            used = 0
            for b in range(nbins):
                if hist[b] > 0:
                    used += 1
            if used <= 1:
                for b in range(nbins):
                    maps[ty, tx, b] = b
                continue
            clip = clip_limit * n_px
            excess = 0.0
            for b in range(nbins):
                if hist[b] > clip:
                    excess += hist[b] - clip
                    hist[b] = clip
            share = excess / nbins
            scale = max_val / n_px
            acc = 0.0
            for b in range(nbins):
                acc += hist[b] + share
                maps[ty, tx, b] = acc * scale
    return maps


def clahe_maps(luma, row_edges, col_edges, nbins, clip_limit):
    return _clahe_maps(np.ascontiguousarray(luma, dtype=np.int64),
                       np.asarray(row_edges, dtype=np.int64),
                       np.asarray(col_edges, dtype=np.int64),
                       int(nbins), float(clip_limit))


@njit(cache=True, nogil=True)
def _locate(pos, centers):
    last = centers.shape[0] - 1
    if pos <= centers[0]:
        return 0, 0, 0.0
    if pos >= centers[last]:
        return last, last, 0.0
    i0 = 0
    while centers[i0 + 1] <= pos:
        i0 += 1
    i1 = i0 + 1
    return i0, i1, (pos - centers[i0]) / (centers[i1] - centers[i0])


@njit(cache=True, nogil=True)
def _clahe_interp(luma, maps, row_centers, col_centers):
    h, w = luma.shape
    out = np.empty((h, w))
    xi0 = np.empty(w, dtype=np.int64)
    xi1 = np.empty(w, dtype=np.int64)
    xw = np.empty(w)
    for x in range(w):
        a, b, c = _locate(float(x), col_centers)
        xi0[x] = a
        xi1[x] = b
        xw[x] = c
    for y in range(h):
        y0, y1, wy = _locate(float(y), row_centers)
        for x in range(w):
            v = luma[y, x]
            x0 = xi0[x]
            x1 = xi1[x]
            wx = xw[x]
            top = (1 - wx) * maps[y0, x0, v] + wx * maps[y0, x1, v]
            bot = (1 - wx) * maps[y1, x0, v] + wx * maps[y1, x1, v]
            out[y, x] = (1 - wy) * top + wy * bot
    return out


def clahe_interp(luma, maps, row_centers, col_centers):
    return _clahe_interp(np.ascontiguousarray(luma, dtype=np.int64), maps,
                         np.asarray(row_centers, dtype=np.float64),
                         np.asarray(col_centers, dtype=np.float64))


@njit(cache=True, nogil=True)
def _nondominated_ranks(objs):
    n, m = objs.shape
    count = np.zeros(n, dtype=np.int64)
    dominated = np.zeros((n, n), dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            le = True
            lt = False
            for k in range(m):
                if objs[i, k] > objs[j, k]:
                    le = False
                    break
                if objs[i, k] < objs[j, k]:
                    lt = True
            if le and lt:
                dominated[i, j] = True
                count[j] += 1
    ranks = np.full(n, -1, dtype=np.int64)
    front = np.empty(n, dtype=np.int64)
    nf = 0
    for i in range(n):
        if count[i] == 0:
            front[nf] = i
            nf += 1
    r = 0
    nxt = np.empty(n, dtype=np.int64)
    while nf > 0:
        nn = 0
        for a in range(nf):
            i = front[a]
            ranks[i] = r
            for j in range(n):
                if dominated[i, j]:
                    count[j] -= 1
                    if count[j] == 0:
                        nxt[nn] = j
                        nn += 1
        front[:nn] = nxt[:nn]
        nf = nn
        r += 1
    return ranks


def nondominated_ranks(objs):
    return _nondominated_ranks(np.ascontiguousarray(objs, dtype=np.float64))
