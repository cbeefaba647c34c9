"""Elementary VMAF features: pixel-domain VIF at four scales, a wavelet
detail-loss measure, and the temporal motion feature.

All arithmetic is float64 on raw sample values.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import astuple, dataclass, fields

import numpy as np

from . import _kernels
from .errors import ShapeError
from .filters import gaussian_blur, gaussian_kernel, separable
from .media import Clip

# Single source of truth for the feature engine. Its hash is echoed in reports.
ENGINE_CONFIG = {
    "vif_window_sigma": 1.5,
    "vif_window_taps": 9,
    "vif_noise_var": 2.0,
    "vif_eps": 1e-10,
    "vif_scales": 4,
    "dlm_wavelet": "db2",
    "dlm_levels": 4,
    "dlm_border": 1,
    "dlm_csf": "none",
    "motion_sigma": 1.0,
    "motion_source": "distorted",
    "boundary": "symmetric",
}
ENGINE_HASH = hashlib.sha256(json.dumps(ENGINE_CONFIG, sort_keys=True).encode()).hexdigest()[:12]

VIF_SIGMA_NSQ = ENGINE_CONFIG["vif_noise_var"]
VIF_EPS = ENGINE_CONFIG["vif_eps"]
DLM_EPS = 1e-6  # below this summed cubed detail energy the reference counts as flat

# Daubechies-2 analysis filters
DB2_LO = np.array([-0.12940952255092145, 0.22414386804185735,
                   0.836516303737469, 0.48296291314469025])
DB2_HI = np.array([-0.48296291314469025, 0.836516303737469,
                   -0.22414386804185735, -0.12940952255092145])


def vif_window() -> np.ndarray:
    taps = ENGINE_CONFIG["vif_window_taps"]
    return gaussian_kernel(ENGINE_CONFIG["vif_window_sigma"], taps // 2)


@dataclass(frozen=True)
class FeatureVector:
    vif_scale0: float
    vif_scale1: float
    vif_scale2: float
    vif_scale3: float
    dlm: float
    motion: float
    degenerate: frozenset = frozenset()

    def values(self) -> tuple[float, ...]:
        return astuple(self)[:6]


FEATURE_NAMES = tuple(f.name for f in fields(FeatureVector))[:6]


def _downscale(plane: np.ndarray, times: int) -> np.ndarray:
    k = vif_window()
    for _ in range(times):
        plane = separable(plane, k)[::2, ::2]
    return plane


def vif_terms(ref: np.ndarray, dist: np.ndarray, scale: int) -> tuple[float, float]:
    """(numerator, denominator) information sums of VIF at one scale."""
    ref = np.asarray(ref, dtype=np.float64)
    dist = np.asarray(dist, dtype=np.float64)
    if ref.shape != dist.shape:
        raise ShapeError(f"shape mismatch {ref.shape} vs {dist.shape}")
    if not 0 <= scale < ENGINE_CONFIG["vif_scales"]:
        raise ValueError(f"scale must be in 0..3, got {scale}")
    if min(ref.shape) >> scale < 2:
        raise ShapeError(f"plane {ref.shape} too small for VIF scale {scale}")
    # moments are shift invariant; centering keeps E[x^2] - mu^2 from cancelling badly
    r = _downscale(ref, scale)
    d = _downscale(dist, scale)
    r = r - r.mean()
    d = d - d.mean()
    k = vif_window()
    mu_r = separable(r, k)
    mu_d = separable(d, k)
    var_r = np.maximum(separable(r * r, k) - mu_r * mu_r, 0.0)
    var_d = np.maximum(separable(d * d, k) - mu_d * mu_d, 0.0)
    cov = separable(r * d, k) - mu_r * mu_d
    g = np.maximum(cov / (var_r + VIF_EPS), 0.0)
    sv = np.maximum(var_d - g * cov, VIF_EPS)
    num = np.log2(1.0 + g * g * var_r / (sv + VIF_SIGMA_NSQ)).sum()
    den = np.log2(1.0 + var_r / VIF_SIGMA_NSQ).sum()
    return float(num), float(den)


def vif_scale(ref: np.ndarray, dist: np.ndarray, scale: int) -> float:
    """VIF ratio at one scale; a flat reference gives 1.0 (see :func:`vif_terms`)."""
    num, den = vif_terms(ref, dist, scale)
    return 1.0 if den <= 0.0 else num / den


def dwt2(plane: np.ndarray):
    """One 2-D db2 analysis level -> (approx, (LH, HL, HH))."""
    lo_r, hi_r = _kernels.dwt_rows(plane, DB2_LO, DB2_HI)
    ll, lh = (a.T for a in _kernels.dwt_rows(np.ascontiguousarray(lo_r.T), DB2_LO, DB2_HI))
    hl, hh = (a.T for a in _kernels.dwt_rows(np.ascontiguousarray(hi_r.T), DB2_LO, DB2_HI))
    return np.ascontiguousarray(ll), (lh, hl, hh)


def detail_bands(plane: np.ndarray, levels: int = 4) -> list[np.ndarray]:
    """Border-cropped detail subbands of all levels, finest first."""
    b = ENGINE_CONFIG["dlm_border"]
    out = []
    approx = np.asarray(plane, dtype=np.float64)
    for _ in range(levels):
        approx, details = dwt2(approx)
        out.extend(d[b:d.shape[0] - b, b:d.shape[1] - b] for d in details)
    return out


def dlm_terms(ref: np.ndarray, dist: np.ndarray) -> tuple[float, float]:
    ref = np.asarray(ref, dtype=np.float64)
    dist = np.asarray(dist, dtype=np.float64)
    if ref.shape != dist.shape:
        raise ShapeError(f"shape mismatch {ref.shape} vs {dist.shape}")
    if min(ref.shape) < 16:
        raise ShapeError(f"plane {ref.shape} too small for DLM (needs >= 16)")
    levels = ENGINE_CONFIG["dlm_levels"]
    num = den = 0.0
    for o, t in zip(detail_bands(ref, levels), detail_bands(dist, levels)):
        restored = np.where(np.sign(o) == np.sign(t), np.minimum(np.abs(t), np.abs(o)), 0.0)
        num += float(np.sum(restored ** 3))
        den += float(np.sum(np.abs(o) ** 3))
    return num, den


def dlm(ref: np.ndarray, dist: np.ndarray) -> float:
    """Ratio of restored to original wavelet detail energy (cube-root norms), in [0, 1]."""
    num, den = dlm_terms(ref, dist)
    if den < DLM_EPS:
        return 1.0
    return min(1.0, max(0.0, (num / den) ** (1.0 / 3.0)))


def motion(prev_luma: np.ndarray | None, cur_luma: np.ndarray) -> float:
    if prev_luma is None:
        return 0.0
    if np.shape(prev_luma) != np.shape(cur_luma):
        raise ShapeError("motion needs equally sized frames")
    s = ENGINE_CONFIG["motion_sigma"]
    a = gaussian_blur(prev_luma, s)
    b = gaussian_blur(cur_luma, s)
    return float(np.mean(np.abs(b - a)))


def frame_features(ref: np.ndarray, dist: np.ndarray, prev_dist: np.ndarray | None) -> FeatureVector:
    vals = []
    flags = set()
    for s in range(ENGINE_CONFIG["vif_scales"]):
        num, den = vif_terms(ref, dist, s)
        if den <= 0.0:
            flags.add(f"vif_scale{s}")
            vals.append(1.0)
        else:
            vals.append(num / den)
    num, den = dlm_terms(ref, dist)
    if den < DLM_EPS:
        flags.add("dlm")
        vals.append(1.0)
    else:
        vals.append(min(1.0, max(0.0, (num / den) ** (1.0 / 3.0))))
    vals.append(motion(prev_dist, dist))
    return FeatureVector(*vals, degenerate=frozenset(flags))


def extract_features(ref: Clip, dist: Clip) -> list[FeatureVector]:
    if len(ref) != len(dist):
        raise ShapeError(f"frame count mismatch: {len(ref)} vs {len(dist)}")
    if ref.meta.width != dist.meta.width or ref.meta.height != dist.meta.height:
        raise ShapeError("reference and distorted clips differ in size")
    out = []
    prev = None
    for rf, df in zip(ref, dist):
        r = rf.luma.astype(np.float64)
        d = r if df.luma is rf.luma else df.luma.astype(np.float64)
        out.append(frame_features(r, d, prev))
        prev = d
    return out


def feature_matrix(fvs) -> np.ndarray:
    return np.array([fv.values() for fv in fvs], dtype=np.float64)

