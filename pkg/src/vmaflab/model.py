"""SVR model files and per-frame VMAF score prediction.

Model file schema (JSON, version ``vmaflab-svr/1``)::

    {
      "version": "vmaflab-svr/1",
      "feature_names": ["vif_scale0", ..., "motion"],
      "norm": [{"slope": s, "intercept": b, "clip_low": lo|null, "clip_high": hi|null}, ...],
      "gamma": g,                      # RBF kernel exp(-g * ||x - sv||^2)
      "bias": b,
      "support_vectors": [[...], ...], # n_sv x n_features, normalized space
      "dual_coefs": [...],             # n_sv
      "score_slope": s, "score_intercept": b,
      "score_clip": [0, 100],
      "score_transform": null | {"a": a, "b": b}
    }

The regressor predicts in normalized score space; the score is recovered as
``(raw - score_intercept) / score_slope``, then the optional affine
transform, then the clamp.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import SchemaError
from .features import FEATURE_NAMES, FeatureVector, extract_features, feature_matrix
from .media import Clip
from .metrics import MetricScore

MODEL_VERSION = "vmaflab-svr/1"
BUNDLED_MODEL = "vmaf_desk_v1.json"

_REQUIRED = ("version", "feature_names", "norm", "gamma", "bias", "support_vectors",
             "dual_coefs", "score_slope", "score_intercept", "score_clip")


@dataclass(frozen=True)
class FeatureNorm:
    slope: float = 1.0
    intercept: float = 0.0
    clip_low: float | None = None
    clip_high: float | None = None


@dataclass(frozen=True, eq=False)
class VmafModel:
    feature_names: tuple[str, ...]
    norm: tuple[FeatureNorm, ...]
    gamma: float
    bias: float
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    score_slope: float = 1.0
    score_intercept: float = 0.0
    score_clip: tuple[float, float] = (0.0, 100.0)
    score_transform: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.feature_names)
        for name in names:
            if name not in FEATURE_NAMES:
                raise SchemaError(f"unknown feature name {name!r}")
        sv = np.array(self.support_vectors, dtype=np.float64)
        coefs = np.array(self.dual_coefs, dtype=np.float64).ravel()
        if sv.ndim != 2 or sv.shape[0] < 1:
            raise SchemaError("support_vectors must be a non-empty matrix")
        if sv.shape[1] != len(names):
            raise SchemaError(f"support vectors have {sv.shape[1]} columns for {len(names)} features")
        if coefs.shape[0] != sv.shape[0]:
            raise SchemaError(f"{sv.shape[0]} support vectors but {coefs.shape[0]} dual coefficients")
        if len(self.norm) != len(names):
            raise SchemaError(f"{len(self.norm)} norm entries for {len(names)} features")
        if not self.gamma > 0:
            raise SchemaError("gamma must be positive")
        if self.score_slope == 0:
            raise SchemaError("score_slope must be non-zero")
        lo, hi = self.score_clip
        if not lo < hi:
            raise SchemaError("score_clip must be [low, high] with low < high")
        sv.flags.writeable = False
        coefs.flags.writeable = False
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "norm", tuple(self.norm))
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "dual_coefs", coefs)
        object.__setattr__(self, "score_clip", (float(lo), float(hi)))
        self_idx = tuple(FEATURE_NAMES.index(n) for n in names)
        object.__setattr__(self, "_columns", self_idx)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def to_dict(self) -> dict:
        d = {
            "version": MODEL_VERSION,
            "feature_names": list(self.feature_names),
            "norm": [
                {"slope": n.slope, "intercept": n.intercept, "clip_low": n.clip_low, "clip_high": n.clip_high}
                for n in self.norm
            ],
            "gamma": self.gamma,
            "bias": self.bias,
            "support_vectors": self.support_vectors.tolist(),
            "dual_coefs": self.dual_coefs.tolist(),
            "score_slope": self.score_slope,
            "score_intercept": self.score_intercept,
            "score_clip": list(self.score_clip),
            "score_transform": (None if self.score_transform is None
                                else {"a": self.score_transform[0], "b": self.score_transform[1]}),
        }
        d.update(self.extra)
        return d


def model_from_dict(d: dict) -> VmafModel:
    if not isinstance(d, dict):
        raise SchemaError("model file must hold a JSON object")
    missing = [k for k in _REQUIRED if k not in d]
    if missing:
        raise SchemaError(f"model file lacks fields: {', '.join(missing)}")
    if d["version"] != MODEL_VERSION:
        raise SchemaError(f"unsupported model version {d['version']!r} (expected {MODEL_VERSION})")
    try:
        norm = tuple(
            FeatureNorm(float(n["slope"]), float(n["intercept"]),
                        None if n.get("clip_low") is None else float(n["clip_low"]),
                        None if n.get("clip_high") is None else float(n["clip_high"]))
            for n in d["norm"]
        )
        st = d.get("score_transform")
        transform = None if st is None else (float(st["a"]), float(st["b"]))
        extra = {k: v for k, v in d.items() if k not in _REQUIRED and k != "score_transform"}
        return VmafModel(
            feature_names=tuple(d["feature_names"]),
            norm=norm,
            gamma=float(d["gamma"]),
            bias=float(d["bias"]),
            support_vectors=d["support_vectors"],
            dual_coefs=d["dual_coefs"],
            score_slope=float(d["score_slope"]),
            score_intercept=float(d["score_intercept"]),
            score_clip=tuple(d["score_clip"]),
            score_transform=transform,
            extra=extra,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"malformed model file: {exc}") from exc


def parse_model(path: str | os.PathLike | None = None) -> VmafModel:
    """Load a model file; ``None`` loads the bundled desk-scale model."""
    if path is None:
        text = resources.files("vmaflab.data").joinpath(BUNDLED_MODEL).read_text()
    else:
        text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"model file is not valid JSON: {exc}") from exc
    return model_from_dict(d)


def dump_model(model: VmafModel, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=1) + "\n")


def normalize_features(fv: FeatureVector | Sequence[float], model: VmafModel) -> np.ndarray:
    values = fv.values() if isinstance(fv, FeatureVector) else tuple(fv)
    if isinstance(fv, FeatureVector):
        values = [values[c] for c in model._columns]
    x = np.empty(model.n_features)
    for i, (v, n) in enumerate(zip(values, model.norm)):
        y = n.slope * v + n.intercept
        if n.clip_low is not None:
            y = max(y, n.clip_low)
        if n.clip_high is not None:
            y = min(y, n.clip_high)
        x[i] = y
    return x


def normalize_matrix(feats: np.ndarray, model: VmafModel) -> np.ndarray:
    """Row-wise :func:`normalize_features` on an (n_frames, 6) feature matrix."""
    x = feats[:, list(model._columns)]
    slope = np.array([n.slope for n in model.norm])
    icpt = np.array([n.intercept for n in model.norm])
    lo = np.array([-np.inf if n.clip_low is None else n.clip_low for n in model.norm])
    hi = np.array([np.inf if n.clip_high is None else n.clip_high for n in model.norm])
    return np.clip(x * slope + icpt, lo, hi)


def svr_predict(x: np.ndarray, model: VmafModel) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValueError(f"expected {model.n_features} normalized features, got shape {x.shape}")
    d2 = np.sum((model.support_vectors - x) ** 2, axis=1)
    return float(np.dot(model.dual_coefs, np.exp(-model.gamma * d2)) + model.bias)


def raw_to_score(raw: float, model: VmafModel) -> float:
    score = (raw - model.score_intercept) / model.score_slope
    if model.score_transform is not None:
        a, b = model.score_transform
        score = a * score + b
    lo, hi = model.score_clip
    return min(hi, max(lo, score))


@dataclass(frozen=True)
class FrameScore:
    raw_svr: float
    score: float


def score_features(fvs: Sequence[FeatureVector], model: VmafModel) -> list[FrameScore]:
    out = []
    for x in normalize_matrix(feature_matrix(fvs), model):
        raw = svr_predict(x, model)
        out.append(FrameScore(raw, raw_to_score(raw, model)))
    return out


def score_clip_pair(ref: Clip, dist: Clip, model: VmafModel,
                    features: Sequence[FeatureVector] | None = None) -> MetricScore:
    if features is None:
        features = extract_features(ref, dist)
    return MetricScore.from_frames([fs.score for fs in score_features(features, model)], "vmaf")
