"""Vectorized numpy versions of the hot kernels.

Boundary handling everywhere is half-sample symmetric reflection
(``d c b a | a b c d | d c b a``), repeated as often as needed so that
kernels wider than the signal still work.
"""

import numpy as np

NAME = "numpy"


def reflect_index(i: np.ndarray, n: int) -> np.ndarray:
    m = np.mod(i, 2 * n)
    return np.where(m >= n, 2 * n - 1 - m, m)


def correlate_rows(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Correlate every row of ``x`` with the odd-length kernel ``k``."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[1]
    r = len(k) // 2
    padded = x[:, reflect_index(np.arange(-r, n + r), n)]
    out = np.zeros_like(x)
    for j in range(len(k)):
        out += k[j] * padded[:, j:j + n]
    return out


def correlate_cols(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    return correlate_rows(np.asarray(x, dtype=np.float64).T, k).T.copy()


def dwt_rows(x: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """One analysis step along axis 1: out[i] = sum_j h[j] * x[2i + 1 - j]."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[1]
    L = len(lo)
    m = (n + L - 1) // 2
    idx = reflect_index(2 * np.arange(m)[:, None] + 1 - np.arange(L)[None, :], n)
    g = x[:, idx]
    return g @ lo, g @ hi


def clahe_maps(luma: np.ndarray, row_edges: np.ndarray, col_edges: np.ndarray,
               nbins: int, clip_limit: float) -> np.ndarray:
    """Per-tile grey-level mappings, shape (tiles_y, tiles_x, nbins)."""
    ny, nx = len(row_edges) - 1, len(col_edges) - 1
    max_val = nbins - 1
    maps = np.empty((ny, nx, nbins))
    identity = np.arange(nbins, dtype=np.float64)
    for ty in range(ny):
        for tx in range(nx):
            tile = luma[row_edges[ty]:row_edges[ty + 1], col_edges[tx]:col_edges[tx + 1]]
            hist = np.bincount(tile.ravel(), minlength=nbins).astype(np.float64)
            n_px = tile.size
            if np.count_nonzero(hist) <= 1:
                maps[ty, tx] = identity
                continue
            clip = clip_limit * n_px
            excess = np.maximum(hist - clip, 0.0).sum()
            hist = np.minimum(hist, clip) + excess / nbins
            maps[ty, tx] = np.cumsum(hist) * (max_val / n_px)
    return maps


def _interp_axis(n: int, centers: np.ndarray):
    pos = np.arange(n, dtype=np.float64)
    last = len(centers) - 1
    i0 = np.clip(np.searchsorted(centers, pos, side="right") - 1, 0, last)
    i1 = np.minimum(i0 + 1, last)
    span = centers[i1] - centers[i0]
    w = np.where(span > 0, (pos - centers[i0]) / np.where(span > 0, span, 1.0), 0.0)
    w = np.clip(w, 0.0, 1.0)
    return i0, i1, w


def clahe_interp(luma: np.ndarray, maps: np.ndarray, row_centers: np.ndarray,
                 col_centers: np.ndarray) -> np.ndarray:
    h, w = luma.shape
    y0, y1, wy = _interp_axis(h, row_centers)
    x0, x1, wx = _interp_axis(w, col_centers)
    v = luma
    Y0, Y1 = y0[:, None], y1[:, None]
    X0, X1 = x0[None, :], x1[None, :]
    WY, WX = wy[:, None], wx[None, :]
    top = (1 - WX) * maps[Y0, X0, v] + WX * maps[Y0, X1, v]
    bot = (1 - WX) * maps[Y1, X0, v] + WX * maps[Y1, X1, v]
    return (1 - WY) * top + WY * bot


def nondominated_ranks(objs: np.ndarray) -> np.ndarray:
    """Front index (0 = non-dominated) for every row of an (n, m) objective array."""
    objs = np.asarray(objs, dtype=np.float64)
    n = len(objs)
    le = np.all(objs[:, None, :] <= objs[None, :, :], axis=2)
    lt = np.any(objs[:, None, :] < objs[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    count = dom.sum(axis=0)
    ranks = np.full(n, -1, dtype=np.int64)
    current = np.flatnonzero(count == 0)
    r = 0
    while current.size:
        ranks[current] = r
        count = count - dom[current].sum(axis=0)
        count[ranks >= 0] = -1
        current = np.flatnonzero(count == 0)
        r += 1
    return ranks
