"""Parametric contrast operators applied to luma: unsharp masking and
contrast-limited adaptive histogram equalization (CLAHE)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .errors import ShapeError
from .filters import gaussian_blur, to_samples
from .media import Clip, Frame

UNSHARP_BOUNDS = {"radius": (0.5, 10.0), "amount": (0.0, 1.0)}
HISTEQ_BOUNDS = {"clip_limit": (0.001, 0.05)}
DEFAULT_KERNEL_SIZE = 8


@dataclass(frozen=True)
class UnsharpMask:
    radius: float
    amount: float
    family = "unsharp"

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if self.amount < 0:
            raise ValueError("amount must be >= 0")

    def as_dict(self) -> dict:
        return {"family": self.family, "radius": self.radius, "amount": self.amount}

    def is_identity(self) -> bool:
        return self.amount == 0


@dataclass(frozen=True)
class HistEq:
    """CLAHE; ``kernel_size`` is the number of tiles per dimension."""

    clip_limit: float
    kernel_size: int = DEFAULT_KERNEL_SIZE
    family = "histeq"

    def __post_init__(self):
        if self.kernel_size < 1:
            raise ValueError("kernel_size must be >= 1")
        if not 0 < self.clip_limit <= 1:
            raise ValueError("clip_limit must be in (0, 1]")

    def as_dict(self) -> dict:
        return {"family": self.family, "kernel_size": self.kernel_size, "clip_limit": self.clip_limit}

    def is_identity(self) -> bool:
        return False


@dataclass(frozen=True)
class Identity:
    family = "identity"

    def as_dict(self) -> dict:
        return {"family": self.family}

    def is_identity(self) -> bool:
        return True


TransformParams = Union[UnsharpMask, HistEq, Identity]


def unsharp_plane(luma: np.ndarray, radius: float, amount: float) -> np.ndarray:
    """Unrounded ``in + amount * (in - blur(in))`` as float64."""
    x = np.asarray(luma, dtype=np.float64)
    return x + amount * (x - gaussian_blur(x, radius))


def unsharp_mask(frame: Frame, radius: float, amount: float) -> Frame:
    if radius <= 0 or amount < 0:
        raise ValueError("need radius > 0 and amount >= 0")
    if amount == 0:
        return frame
    out = unsharp_plane(frame.luma, radius, amount)
    return frame.with_luma(to_samples(out, frame.meta.max_value, frame.meta.dtype))


def tile_edges(n: int, tiles: int) -> np.ndarray:
    return (np.arange(tiles + 1) * n) // tiles


def clahe_plane(luma: np.ndarray, kernel_size: int, clip_limit: float, max_value: int) -> np.ndarray:
    """Float CLAHE output before rounding.

    Each tile's histogram is clipped at ``clip_limit * tile_pixels`` counts
    per bin and the excess spread evenly over all bins (single pass). Tiles
    whose histogram holds one grey level map it to itself.
    """
    luma = np.asarray(luma)
    h, w = luma.shape
    if h < kernel_size or w < kernel_size:
        raise ShapeError(f"frame {h}x{w} smaller than the {kernel_size}x{kernel_size} tile grid")
    rows = tile_edges(h, kernel_size)
    cols = tile_edges(w, kernel_size)
    v = luma.astype(np.int64)
    maps = _kernels.clahe_maps(v, rows, cols, max_value + 1, clip_limit)
    row_c = (rows[:-1] + rows[1:] - 1) / 2.0
    col_c = (cols[:-1] + cols[1:] - 1) / 2.0
    return _kernels.clahe_interp(v, maps, row_c, col_c)


def hist_equalize(frame: Frame, kernel_size: int = DEFAULT_KERNEL_SIZE, clip_limit: float = 0.01) -> Frame:
    if kernel_size < 1 or not 0 < clip_limit <= 1:
        raise ValueError("need kernel_size >= 1 and 0 < clip_limit <= 1")
    out = clahe_plane(frame.luma, kernel_size, clip_limit, frame.meta.max_value)
    return frame.with_luma(to_samples(out, frame.meta.max_value, frame.meta.dtype))


def apply_frame(frame: Frame, params: TransformParams) -> Frame:
    if isinstance(params, UnsharpMask):
        return unsharp_mask(frame, params.radius, params.amount)
    if isinstance(params, HistEq):
        return hist_equalize(frame, params.kernel_size, params.clip_limit)
    if isinstance(params, Identity):
        return frame
    raise TypeError(f"unknown transform {params!r}")


def apply_transform(clip: Clip, params: TransformParams) -> Clip:
    return Clip(clip.meta, tuple(apply_frame(f, params) for f in clip))


def params_from_genes(family: str, genes, kernel_size: int = DEFAULT_KERNEL_SIZE) -> TransformParams:
    if family == "unsharp":
        return UnsharpMask(radius=float(genes[0]), amount=float(genes[1]))
    if family == "histeq":
        return HistEq(clip_limit=float(genes[0]), kernel_size=kernel_size)
    raise ValueError(f"unknown transform family {family!r}")
