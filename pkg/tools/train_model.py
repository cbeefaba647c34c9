"""Fit the bundled desk-scale SVR model. Offline tool; not imported by the package.

Training pairs are degraded versions of public test images (scikit-image
sample data) plus a few synthetic scenes, panned to make short clips.
Degradations: Gaussian blur, additive noise, 8x8 DCT quantization and
down/up-scaling, alone and combined. Enhancement is never shown to the
regressor, as with models trained on compressed content.

Labels are a pseudo opinion score: a 3-scale SSIM product, with
distortion visibility discounted by motion (temporal masking), mapped onto
0..PRISTINE_SCORE. They stand in for subjective data, which we do not have.

    python tools/train_model.py [--out src/vmaflab/data/vmaf_desk_v1.json]
"""

from __future__ import annotations

import argparse
import json
import math
import os
import warnings

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import zoom
from sklearn.model_selection import GroupKFold, cross_val_score
from sklearn.svm import SVR

from vmaflab.features import ENGINE_HASH, FEATURE_NAMES, extract_features, feature_matrix
from vmaflab.filters import gaussian_blur, to_samples
from vmaflab.media import Clip, VideoMeta
from vmaflab.metrics import ssim_plane
from vmaflab.synthetic import _texture

PRISTINE_SCORE = 97.0
SENSITIVITY = 6.0
MASKING_MOTION = 10.0
H, W, FRAMES = 108, 192, 3
SSIM_SCALE_WEIGHTS = (0.2, 0.4, 0.4)


def source_images(rng):
    import skimage.color
    import skimage.data

    names = ["camera", "astronaut", "coffee", "chelsea", "rocket", "coins", "moon",
             "brick", "grass", "gravel", "clock", "immunohistochemistry", "cat", "page"]
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in names:
            img = getattr(skimage.data, n)()
            if img.ndim == 3:
                img = skimage.color.rgb2gray(img) * 255.0
            out[n] = img.astype(np.float64)
    yy, xx = np.mgrid[0:300, 0:400] / 400.0
    out["synthetic_flat"] = 120 + 30 * xx + 10 * yy + 4 * _texture(rng, (300, 400))
    out["synthetic_grain"] = 128 + 40 * _texture(rng, (300, 400), scales=(0.7, 1.5, 3.0))
    return out


def make_clip(img, rng, contrast, speed):
    need_h, need_w = H + FRAMES * speed + 1, W + FRAMES * speed + 1
    if img.shape[0] < need_h or img.shape[1] < need_w:
        img = zoom(img, max(need_h / img.shape[0], need_w / img.shape[1]) + 0.01, order=1)
    y0 = rng.integers(0, img.shape[0] - need_h + 1)
    x0 = rng.integers(0, img.shape[1] - need_w + 1)
    crop = img[y0:y0 + need_h, x0:x0 + need_w]
    crop = crop.mean() + contrast * (crop - crop.mean())
    meta = VideoMeta(W, H, chroma_format="luma_only")
    planes = [crop[t * speed:t * speed + H, t * speed:t * speed + W] for t in range(FRAMES)]
    return Clip.from_luma([to_samples(p, 255, np.uint8) for p in planes], meta)


def dct_quantize(p, step):
    h, w = p.shape
    out = p.copy()
    for y in range(0, h - h % 8, 8):
        for x in range(0, w - w % 8, 8):
            c = dctn(p[y:y + 8, x:x + 8] - 128, norm="ortho")
            q = step * (1 + np.add.outer(np.arange(8), np.arange(8)) / 4.0)
            out[y:y + 8, x:x + 8] = idctn(np.round(c / q) * q, norm="ortho") + 128
    return out


def rescale(p, f):
    small = zoom(p, 1.0 / f, order=1)
    return zoom(small, (p.shape[0] / small.shape[0], p.shape[1] / small.shape[1]), order=1)


def degrade(p, kind, level, rng):
    if kind == "blur":
        return gaussian_blur(p, level)
    if kind == "noise":
        return p + level * rng.standard_normal(p.shape)
    if kind == "dct":
        return dct_quantize(p, level)
    if kind == "scale":
        return rescale(p, level)
    if kind == "dct+blur":
        return dct_quantize(gaussian_blur(p, level[1]), level[0])
    if kind == "noise+blur":
        return gaussian_blur(p, level[1]) + level[0] * rng.standard_normal(p.shape)
    raise ValueError(kind)


DEGRADATIONS = (
    [("none", 0)] * 3
    + [("blur", s) for s in (0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0)]
    + [("noise", s) for s in (1, 2, 4, 8, 14, 20)]
    + [("dct", q) for q in (2, 4, 8, 14, 24, 40)]
    + [("scale", f) for f in (1.5, 2.0, 3.0, 4.0)]
    + [("dct+blur", (8, 1.0)), ("dct+blur", (20, 1.5)), ("noise+blur", (4, 1.0)), ("noise+blur", (10, 2.0))]
)


def pseudo_mos(ref, dist, motion):
    q = 1.0
    r, d = ref, dist
    for i, w in enumerate(SSIM_SCALE_WEIGHTS):
        if i:
            r = gaussian_blur(r, 1.0)[::2, ::2]
            d = gaussian_blur(d, 1.0)[::2, ::2]
        q *= max(ssim_plane(r, d, 255.0), 1e-6) ** w
    loss = (1.0 - q) / (1.0 + motion / MASKING_MOTION)
    return PRISTINE_SCORE * math.exp(-SENSITIVITY * loss)


def build_dataset(seed):
    rng = np.random.default_rng(seed)
    X, y, groups = [], [], []
    for gi, (name, img) in enumerate(source_images(rng).items()):
        for contrast in (0.25, 0.5, 1.0):
            for speed in (0, 2, 5):
                ref = make_clip(img, rng, contrast, speed)
                for kind, level in DEGRADATIONS:
                    planes = []
                    for f in ref:
                        p = f.luma.astype(np.float64)
                        planes.append(p if kind == "none" else degrade(p, kind, level, rng))
                    dist = Clip.from_luma([to_samples(p, 255, np.uint8) for p in planes], ref.meta)
                    feats = extract_features(ref, dist)
                    for fr, fd, fv in zip(ref, dist, feats):
                        X.append(fv.values())
                        y.append(pseudo_mos(fr.luma.astype(float), fd.luma.astype(float), fv.motion))
                        groups.append(gi)
    return np.array(X), np.array(y), np.array(groups)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="src/vmaflab/data/vmaf_desk_v1.json")
    ap.add_argument("--seed", type=int, default=2019)
    ap.add_argument("--cache", help="npz file to reuse / store the feature dataset")
    ap.add_argument("--max-rows", type=int, default=5000,
                    help="random subset of frames used for fitting (keeps the support vector count down)")
    args = ap.parse_args()

    if args.cache and os.path.exists(args.cache):
        data = np.load(args.cache)
        X, y, groups = data["X"], data["y"], data["groups"]
    else:
        X, y, groups = build_dataset(args.seed)
        if args.cache:
            np.savez(args.cache, X=X, y=y, groups=groups)
    print(f"{len(X)} training frames, label range {y.min():.1f}..{y.max():.1f}")
    if len(X) > args.max_rows:
        keep = np.sort(np.random.default_rng(args.seed).choice(len(X), args.max_rows, replace=False))
        X, y, groups = X[keep], y[keep], groups[keep]
        print(f"fitting on a random subset of {len(X)} frames")

    lo, hi = X.min(axis=0), X.max(axis=0)
    slope = 2.0 / (hi - lo)
    icpt = -1.0 - lo * slope
    Xn = X * slope + icpt
    score_slope, score_intercept = 1.0 / 100.0, 0.0
    yn = y * score_slope + score_intercept

    best = None
    for C in (1.0, 4.0, 16.0):
        for gamma in (0.05, 0.1, 0.25, 0.5):
            svr = SVR(kernel="rbf", C=C, gamma=gamma, epsilon=0.01)
            cv = cross_val_score(svr, Xn, yn, groups=groups, cv=GroupKFold(4),
                                 scoring="neg_root_mean_squared_error")
            rmse = -cv.mean() * 100
            print(f"C={C:5.1f} gamma={gamma:5.2f} cv rmse {rmse:.3f}")
            if best is None or rmse < best[0]:
                best = (rmse, C, gamma)
    rmse, C, gamma = best
    svr = SVR(kernel="rbf", C=C, gamma=gamma, epsilon=0.01).fit(Xn, yn)
    print(f"chosen C={C} gamma={gamma} (cv rmse {rmse:.3f}), {len(svr.support_)} support vectors")

    model = {
        "version": "vmaflab-svr/1",
        "description": "desk-scale VMAF-style fusion model fitted by tools/train_model.py",
        "engine_hash": ENGINE_HASH,
        "feature_names": list(FEATURE_NAMES),
        "norm": [{"slope": float(s), "intercept": float(b), "clip_low": None, "clip_high": None}
                 for s, b in zip(slope, icpt)],
        "gamma": float(gamma),
        "bias": float(svr.intercept_[0]),
        "support_vectors": svr.support_vectors_.tolist(),
        "dual_coefs": svr.dual_coef_[0].tolist(),
        "score_slope": score_slope,
        "score_intercept": score_intercept,
        "score_clip": [0.0, 100.0],
        "score_transform": None,
    }
    with open(args.out, "w") as fh:
        json.dump(model, fh, indent=1)
        fh.write("\n")
    print("wrote", args.out)


if __name__ == "__main__":
    main()
