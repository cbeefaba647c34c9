"""Separable Gaussian filtering and small pixel helpers shared by metrics and transforms."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import _kernels


@lru_cache(maxsize=64)
def _gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    k /= k.sum()
    k.flags.writeable = False
    return k


def gaussian_kernel(sigma: float, radius: int | None = None) -> np.ndarray:
    """Normalized 1-D Gaussian taps; ``radius`` defaults to ceil(3 sigma)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if radius is None:
        radius = math.ceil(3 * sigma)
    return _gaussian_kernel(float(sigma), int(radius))


def separable(plane: np.ndarray, k: np.ndarray) -> np.ndarray:
    return _kernels.correlate_cols(_kernels.correlate_rows(plane, k), k)


def gaussian_blur(plane: np.ndarray, sigma: float, radius: int | None = None) -> np.ndarray:
    """Separable Gaussian blur with symmetric (reflect) borders, float64 out."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.size == 1:
        return plane.copy()
    return separable(plane, gaussian_kernel(sigma, radius))


def round_half_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def to_samples(x: np.ndarray, max_value: int, dtype) -> np.ndarray:
    """Clamp to [0, max_value], round half away from zero, cast."""
    return round_half_away(np.clip(x, 0, max_value)).astype(dtype)


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)


def sobel_magnitude(plane: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude over the interior (valid region, 2 px smaller)."""
    p = np.asarray(plane, dtype=np.float64)
    h, w = p.shape
    if h < 3 or w < 3:
        return np.zeros((0, 0))
    gx = np.zeros((h - 2, w - 2))
    gy = np.zeros((h - 2, w - 2))
    for dy in range(3):
        for dx in range(3):
            win = p[dy:dy + h - 2, dx:dx + w - 2]
            gx += _SOBEL_X[dy, dx] * win
            gy += _SOBEL_X.T[dy, dx] * win
    return np.hypot(gx, gy)
