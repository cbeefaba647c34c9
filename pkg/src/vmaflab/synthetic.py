"""Deterministic synthetic test clips.

The bundled clips stand in for natural test sequences: a flat, low-contrast
scene (gradient plus faint texture) and a contrasted one (hard edges plus
grain), both panning slowly so the motion feature is non-trivial.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .filters import gaussian_blur, to_samples
from .media import Clip, Frame, VideoMeta, load_clip

LOW_CONTRAST_FILE = "low_contrast.y4m"
CONTRASTED_FILE = "contrasted.y4m"


def _texture(rng: np.random.Generator, shape, scales=(1.0, 2.5, 6.0), weights=(0.5, 1.0, 1.0)) -> np.ndarray:
    tex = np.zeros(shape)
    for s, w in zip(scales, weights):
        layer = gaussian_blur(rng.standard_normal(shape), s)
        tex += w * layer / (layer.std() + 1e-12)
    return tex / tex.std()


def _pan(canvas: np.ndarray, height: int, width: int, frames: int, dy: int, dx: int):
    for t in range(frames):
        y, x = t * dy, t * dx
        yield canvas[y:y + height, x:x + width]


def _clip(planes, meta: VideoMeta) -> Clip:
    return Clip(meta, tuple(Frame(to_samples(p, meta.max_value, meta.dtype), meta) for p in planes))


def low_contrast_clip(width: int = 192, height: int = 108, frames: int = 16, seed: int = 7) -> Clip:
    rng = np.random.default_rng(seed)
    H, W = height + 2 * frames, width + 2 * frames
    yy, xx = np.mgrid[0:H, 0:W] / max(H, W)
    base = 112 + 28 * xx + 14 * yy + 6 * np.sin(3.1 * xx + 1.7 * yy)
    canvas = base + 3.5 * _texture(rng, (H, W))
    meta = VideoMeta(width, height, bit_depth=8, chroma_format="420")
    return _clip(_pan(canvas, height, width, frames, 1, 2), meta)


def contrasted_clip(width: int = 192, height: int = 108, frames: int = 16, seed: int = 11) -> Clip:
    rng = np.random.default_rng(seed)
    H, W = height + 2 * frames, width + 2 * frames
    canvas = np.full((H, W), 60.0)
    for _ in range(40):
        y0, x0 = rng.integers(0, H - 8), rng.integers(0, W - 8)
        h, w = rng.integers(6, H // 2), rng.integers(6, W // 2)
        canvas[y0:y0 + h, x0:x0 + w] = rng.uniform(20, 235)
    canvas = gaussian_blur(canvas, 0.7) + 14 * _texture(rng, (H, W), scales=(0.8, 2.0, 5.0))
    canvas += 4 * rng.standard_normal((H, W))
    meta = VideoMeta(width, height, bit_depth=8, chroma_format="420")
    return _clip(_pan(canvas, height, width, frames, 1, 1), meta)


def texture_clip(seed: int, width: int = 96, height: int = 64, frames: int = 3,
                 contrast: float = 30.0, mean: float = 128.0) -> Clip:
    """Small random textured clip for tests (luma only)."""
    rng = np.random.default_rng(seed)
    H, W = height + 2 * frames, width + 2 * frames
    canvas = mean + contrast * _texture(rng, (H, W))
    meta = VideoMeta(width, height, chroma_format="luma_only")
    return _clip(_pan(canvas, height, width, frames, 1, 1), meta)


def bundled_clip(name: str) -> Clip:
    """Load one of the packaged clips: ``"low_contrast"`` or ``"contrasted"``."""
    fname = {"low_contrast": LOW_CONTRAST_FILE, "contrasted": CONTRASTED_FILE}[name]
    with resources.as_file(resources.files("vmaflab.data").joinpath(fname)) as p:
        return load_clip(p)


def bundled_clip_path(name: str):
    fname = {"low_contrast": LOW_CONTRAST_FILE, "contrasted": CONTRASTED_FILE}[name]
    return resources.files("vmaflab.data").joinpath(fname)
