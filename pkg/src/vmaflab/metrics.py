"""PSNR, SSIM and SI/TI on luma planes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError
from .filters import gaussian_kernel, separable, sobel_magnitude
from .media import Clip, Frame

PSNR_CAP = 100.0
SSIM_WINDOW_SIGMA = 1.5
SSIM_WINDOW_RADIUS = 5  # 11 taps
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricScore:
    per_frame: tuple[float, ...]
    pooled: float
    metric_id: str

    @classmethod
    def from_frames(cls, values: Sequence[float], metric_id: str) -> MetricScore:
        values = tuple(float(v) for v in values)
        if not values:
            raise ValueError("no per-frame values to pool")
        return cls(values, pool(values), metric_id)


def pool(values: Sequence[float]) -> float:
    """Arithmetic mean; fsum keeps it independent of frame order."""
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class SiTi:
    si: float
    ti: float
    ti_valid: bool = True


def _check_pair(ref: Frame, dist: Frame) -> None:
    if ref.luma.shape != dist.luma.shape or ref.meta.bit_depth != dist.meta.bit_depth:
        raise ShapeError(f"frame mismatch: {ref.luma.shape}/{ref.meta.bit_depth}-bit "
                         f"vs {dist.luma.shape}/{dist.meta.bit_depth}-bit")


def psnr_frame(ref: Frame, dist: Frame) -> float:
    _check_pair(ref, dist)
    diff = ref.luma.astype(np.float64) - dist.luma.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP
    peak = float(ref.meta.max_value)
    return min(PSNR_CAP, 10.0 * math.log10(peak * peak / mse))


def ssim_plane(a: np.ndarray, b: np.ndarray, max_value: float) -> float:
    """Mean SSIM map between two float planes (Gaussian 11x11 window, sigma 1.5)."""
    if min(a.shape) < 2 * SSIM_WINDOW_RADIUS + 1:
        raise ShapeError(f"plane {a.shape} smaller than the 11x11 SSIM window")
    k = gaussian_kernel(SSIM_WINDOW_SIGMA, SSIM_WINDOW_RADIUS)
    c1 = (SSIM_K1 * max_value) ** 2
    c2 = (SSIM_K2 * max_value) ** 2
    mu_a = separable(a, k)
    mu_b = separable(b, k)
    var_a = separable(a * a, k) - mu_a * mu_a
    var_b = separable(b * b, k) - mu_b * mu_b
    cov = separable(a * b, k) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def ssim_frame(ref: Frame, dist: Frame) -> float:
    _check_pair(ref, dist)
    if ref.luma is dist.luma or np.array_equal(ref.luma, dist.luma):
        return 1.0
    a = ref.luma.astype(np.float64)
    b = dist.luma.astype(np.float64)
    return ssim_plane(a, b, float(ref.meta.max_value))


def _clip_metric(fn: Callable[[Frame, Frame], float], metric_id: str,
                 ref: Clip, dist: Clip) -> MetricScore:
    if len(ref) != len(dist):
        raise ShapeError(f"frame count mismatch: {len(ref)} vs {len(dist)}")
    return MetricScore.from_frames([fn(r, d) for r, d in zip(ref, dist)], metric_id)


def psnr_clip(ref: Clip, dist: Clip) -> MetricScore:
    return _clip_metric(psnr_frame, "psnr", ref, dist)


def ssim_clip(ref: Clip, dist: Clip) -> MetricScore:
    return _clip_metric(ssim_frame, "ssim", ref, dist)


def si_ti(clip: Clip) -> SiTi:
    """Spatial / temporal information of a clip's luma.

    SI is the max over frames of the stddev of the Sobel magnitude (interior
    pixels); TI the max over consecutive pairs of the stddev of the frame
    difference. A one-frame clip reports ``ti = 0`` with ``ti_valid`` false.
    """
    lumas = [f.luma.astype(np.float64) for f in clip]
    si = max(float(np.std(sobel_magnitude(p))) if min(p.shape) >= 3 else 0.0 for p in lumas)
    if len(lumas) < 2:
        return SiTi(si, 0.0, ti_valid=False)
    ti = max(float(np.std(b - a)) for a, b in zip(lumas, lumas[1:]))
    return SiTi(si, ti)
