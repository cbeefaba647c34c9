"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

    pytest tests/test_acceptance.py
"""

import csv
import io
import json
import time
from importlib import resources

import numpy as np
import pytest

from vmaflab.enhance import unsharp_mask
from vmaflab.features import dlm, extract_features, vif_scale
from vmaflab.filters import gaussian_blur, to_samples
from vmaflab.harness import RunConfig, run_search
from vmaflab.media import Clip, Frame, VideoMeta, load_clip, save_clip
from vmaflab.metrics import psnr_clip, ssim_clip
from vmaflab.model import dump_model, model_from_dict, parse_model, score_clip_pair, svr_predict
from vmaflab.nsga2 import Bounds, Individual, NSGA2Config, evolve, fast_nondominated_sort
from vmaflab.report import CSV_HEADER, read_csv
from vmaflab.synthetic import bundled_clip_path, texture_clip

import oracles

pytestmark = pytest.mark.acceptance


def test_criterion_1_metric_identity(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    problems = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        clip = texture_clip(seed, width=int(rng.integers(32, 97)), height=int(rng.integers(32, 65)),
                            frames=int(rng.integers(1, 4)), contrast=float(rng.uniform(5, 60)),
                            mean=float(rng.uniform(60, 190)))
        fvs = extract_features(clip, clip)
        for i, fv in enumerate(fvs):
            worst = max(worst, max(abs(v - 1.0) for v in fv.values()[:5]))
            if i == 0:
                want = 0.0
            else:
                a = gaussian_blur(clip[i - 1].luma.astype(float), 1.0)
                b = gaussian_blur(clip[i].luma.astype(float), 1.0)
                want = float(np.mean(np.abs(b - a)))
            if abs(fv.motion - want) > 1e-9:
                problems.append(f"seed {seed} frame {i} motion {fv.motion} != {want}")
        if ssim_clip(clip, clip).pooled != 1.0 or psnr_clip(clip, clip).pooled != 100.0:
            problems.append(f"seed {seed}: SSIM/PSNR not at identity values")
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and not problems and dt < 30
    verdict(1, "metric identity suite", ok,
            f"20 clips, max |feature - 1| = {worst:.2e}, {len(problems)} problems", dt)


def test_criterion_2_oracle_suite(verdict):
    t0 = time.perf_counter()
    n = 100
    rng = np.random.default_rng(2024)
    errs = {"vif_scale": 0.0, "dlm": 0.0, "gaussian_blur": 0.0, "unsharp_mask": 0.0, "svr_predict": 0.0}
    sort_mismatch = 0
    for _ in range(n):
        h, w = int(rng.integers(16, 22)), int(rng.integers(16, 22))
        ref = np.round(gaussian_blur(rng.uniform(0, 255, (h, w)), float(rng.uniform(0.5, 2))))
        dist = np.clip(np.round(ref + rng.normal(0, rng.uniform(1, 20), ref.shape)), 0, 255)
        s = int(rng.integers(0, 4))
        got, want = vif_scale(ref, dist, s), oracles.vif(ref, dist, s)
        errs["vif_scale"] = max(errs["vif_scale"], abs(got - want) / max(1.0, abs(want)))
        got, want = dlm(ref, dist), oracles.dlm(ref, dist)
        errs["dlm"] = max(errs["dlm"], abs(got - want))

        sigma = float(rng.uniform(0.3, 5))
        p = rng.normal(size=(int(rng.integers(1, 12)), int(rng.integers(1, 12))))
        errs["gaussian_blur"] = max(errs["gaussian_blur"],
                                    float(np.max(np.abs(gaussian_blur(p, sigma) - oracles.gaussian_blur(p, sigma)))))

        plane = rng.integers(0, 256, (int(rng.integers(4, 14)), int(rng.integers(4, 14))))
        meta = VideoMeta(plane.shape[1], plane.shape[0], chroma_format="luma_only")
        radius, amount = float(rng.uniform(0.5, 10)), float(rng.uniform(0.01, 1))
        got = unsharp_mask(Frame(plane, meta), radius, amount).luma
        want_int, raw = oracles.unsharp(plane, radius, amount)
        # exact unless the unrounded value sits within float noise of a .5 boundary
        frac = np.abs(np.clip(raw, 0, 255) % 1 - 0.5)
        mismatch = (got != want_int) & (frac > 1e-9)
        errs["unsharp_mask"] = max(errs["unsharp_mask"], float(mismatch.sum()))

        n_sv = int(rng.integers(1, 40))
        d = {"version": "vmaflab-svr/1", "feature_names": ["vif_scale0", "vif_scale1", "vif_scale2",
                                                           "vif_scale3", "dlm", "motion"],
             "norm": [{"slope": 1.0, "intercept": 0.0}] * 6, "gamma": float(rng.uniform(0.01, 3)),
             "bias": float(rng.normal()), "support_vectors": rng.uniform(-1, 1, (n_sv, 6)).tolist(),
             "dual_coefs": rng.normal(size=n_sv).tolist(), "score_slope": 1.0, "score_intercept": 0.0,
             "score_clip": [0, 100]}
        m = model_from_dict(d)
        x = rng.uniform(-1.2, 1.2, 6)
        want = oracles.svr(x.tolist(), d["support_vectors"], d["dual_coefs"], d["gamma"], d["bias"])
        errs["svr_predict"] = max(errs["svr_predict"], abs(svr_predict(x, m) - want))

        objs = rng.integers(0, 6, (int(rng.integers(1, 30)), int(rng.integers(2, 4)))).tolist()
        pop = [Individual(genes=np.zeros(1), objectives=tuple(o)) for o in objs]
        if [sorted(f) for f in fast_nondominated_sort(pop)] != oracles.nondominated_fronts(objs):
            sort_mismatch += 1
    dt = time.perf_counter() - t0
    tol = {"vif_scale": 1e-8, "dlm": 1e-8, "gaussian_blur": 1e-8, "unsharp_mask": 0.0, "svr_predict": 1e-12}
    ok = all(errs[k] <= tol[k] for k in tol) and sort_mismatch == 0 and dt < 120
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + f", sort mismatches {sort_mismatch}"
    verdict(2, f"brute-force oracle suite ({n} instances each)", ok, detail, dt)


def _blurred(clip, sigma):
    return Clip(clip.meta, tuple(f.with_luma(to_samples(gaussian_blur(f.luma, sigma), 255, np.uint8))
                                 for f in clip))


def test_criterion_3_distortion_monotonicity(verdict):
    t0 = time.perf_counter()
    model = parse_model()
    failures = []
    for seed in range(5):
        ref = texture_clip(seed, contrast=20 + 10 * seed)
        rows = []
        for sigma in (1, 2, 4):
            d = _blurred(ref, sigma)
            rows.append((score_clip_pair(ref, d, model).pooled, ssim_clip(ref, d).pooled, psnr_clip(ref, d).pooled))
        for k, name in enumerate(("VMAF", "SSIM", "PSNR")):
            vals = [r[k] for r in rows]
            if not vals[0] > vals[1] > vals[2]:
                failures.append(f"clip {seed} {name} {np.round(vals, 4).tolist()}")
    dt = time.perf_counter() - t0
    verdict(3, "distortion monotonicity", not failures and dt < 60,
            "5 clips x sigma {1,2,4}; " + ("all strictly decreasing" if not failures else "; ".join(failures)), dt)


def test_criterion_4_optimizer_convergence(verdict):
    t0 = time.perf_counter()

    def toy(g):
        return (g[0] ** 2, (g[0] - 2.0) ** 2)

    cfg = NSGA2Config(pop_size=24, generations=30, seed=7)
    a = evolve(toy, Bounds((-5.0,), (5.0,)), cfg)
    b = evolve(toy, Bounds((-5.0,), (5.0,)), cfg)
    xs = a.genes()[:, 0]
    same = np.array_equal(a.genes(), b.genes()) and np.array_equal(a.objectives(), b.objectives())
    dt = time.perf_counter() - t0
    ok = len(a) >= 10 and xs.min() <= 0.1 and xs.max() >= 1.9 and same and dt < 5
    verdict(4, "optimizer convergence on g^2, (g-2)^2", ok,
            f"{len(a)} members spanning [{xs.min():.3f}, {xs.max():.3f}], deterministic={same}", dt)


def _search(family, clip_name, out_dir):
    with resources.as_file(bundled_clip_path(clip_name)) as path:
        cfg = RunConfig(ref_path=str(path), family=family, nsga=NSGA2Config(pop_size=24, generations=30, seed=0),
                        subsample=2, output_dir=str(out_dir))
        return run_search(cfg)


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    t0 = time.perf_counter()
    runs = {}
    for family, clip in (("unsharp", "low_contrast"), ("histeq", "contrasted")):
        first = tmp_path_factory.mktemp(f"{family}_a")
        second = tmp_path_factory.mktemp(f"{family}_b")
        rep = _search(family, clip, first)
        _search(family, clip, second)
        runs[family] = (rep, first / "report.csv", second / "report.csv")
    return runs, time.perf_counter() - t0


@pytest.mark.slow
def test_criterion_5_desk_scale_reproduction(verdict, desk_runs):
    runs, dt = desk_runs
    rep_u = runs["unsharp"][0]
    rep_h = runs["histeq"][0]
    hits_u = [r for r in rep_u.records if r.delta_vmaf >= 1.0 and r.delta_ssim >= -0.005]
    hits_h = [r for r in rep_h.records if r.delta_vmaf > 0.0 and r.delta_ssim >= -0.01]
    best_u = max(hits_u or rep_u.records, key=lambda r: (r.delta_vmaf, r.delta_ssim))
    best_h = max([r for r in rep_h.records if r.delta_ssim >= -0.01] or rep_h.records,
                 key=lambda r: (r.delta_vmaf, r.delta_ssim))
    params_u = ", ".join(f"{k} {v:.4f}" for k, v in best_u.params.as_dict().items() if k != "family")
    detail = (f"unsharp on low_contrast {'PASS' if hits_u else 'FAIL'}: {len(hits_u)} hits, "
              f"best dVMAF {best_u.delta_vmaf:+.3f} dSSIM {best_u.delta_ssim:+.5f} at {params_u}; "
              f"histeq on contrasted {'PASS' if hits_h else 'FAIL'}: {len(hits_h)} hits, "
              f"best dVMAF {best_h.delta_vmaf:+.3f} dSSIM {best_h.delta_ssim:+.5f} "
              f"at clip_limit {best_h.params.clip_limit:.4f}")
    verdict(5, "desk-scale second-quadrant search (pop 24 x 30 gens, subsample 2)",
            bool(hits_u) and bool(hits_h) and dt < 600, detail, dt)


@pytest.mark.slow
def test_criterion_6_determinism(verdict, desk_runs):
    runs, dt = desk_runs
    same = {fam: a.read_bytes() == b.read_bytes() for fam, (_, a, b) in runs.items()}
    verdict(6, "same seed gives byte-identical report.csv", all(same.values()),
            ", ".join(f"{k}: {'identical' if v else 'DIFFERENT'}" for k, v in same.items()), dt)


def test_criterion_7_round_trips(verdict, tmp_path):
    t0 = time.perf_counter()
    bad = []
    rng = np.random.default_rng(77)
    for i in range(50):
        fmt = ["420", "422", "444", "luma_only"][i % 4]
        depth = (8, 10)[(i // 4) % 2]
        w = 2 * int(rng.integers(1, 20))
        h = 2 * int(rng.integers(1, 20))
        meta = VideoMeta(w, h, bit_depth=depth, chroma_format=fmt)
        frames = []
        for _ in range(int(rng.integers(1, 4))):
            y = rng.integers(0, meta.max_value + 1, (h, w))
            if meta.chroma_shape is None:
                frames.append(Frame(y, meta))
            else:
                u = rng.integers(0, meta.max_value + 1, meta.chroma_shape)
                v = rng.integers(0, meta.max_value + 1, meta.chroma_shape)
                frames.append(Frame(y, meta, u, v))
        clip = Clip(meta, tuple(frames))
        path = tmp_path / f"c{i}.y4m"
        save_clip(clip, path)
        back = load_clip(path)
        if back.meta != meta or not back.same_samples(clip):
            bad.append(f"y4m clip {i}")

    model = parse_model()
    mpath = tmp_path / "model.json"
    dump_model(model, mpath)
    if json.loads(mpath.read_text()) != model.to_dict() or parse_model(mpath).to_dict() != model.to_dict():
        bad.append("model file")

    from vmaflab.harness import EvalRecord, ParetoReport
    from vmaflab.enhance import HistEq, Identity, UnsharpMask
    from vmaflab.report import emit_csv

    recs = [EvalRecord(UnsharpMask(float(rng.uniform(0.5, 10)), float(rng.uniform(0, 1))),
                       *rng.uniform(0, 100, 3), *rng.normal(0, 1, 2), False) for _ in range(10)]
    recs.append(EvalRecord(HistEq(0.0042), 50.0, 0.9, 30.0, 1.0, -0.003, True))
    base = EvalRecord(Identity(), 97.0, 1.0, 100.0, 0.0, 0.0, False)
    report = ParetoReport(base, recs, recs[:2], {})
    cpath = tmp_path / "report.csv"
    emit_csv(report, cpath)
    rows = read_csv(cpath)
    for row, r in zip(rows[1:], recs):
        if abs(row["vmaf"] - r.vmaf) > 5e-7 or abs(row["delta_ssim"] - r.delta_ssim) > 5e-7:
            bad.append(f"csv row {row['index']}")
    # re-serializing the parsed rows reproduces the file byte for byte
    buf = io.StringIO(newline="")
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for row in rows:
        cells = []
        for k in CSV_HEADER:
            v = row[k]
            if v is None:
                cells.append("")
            elif k in ("radius", "amount", "clip_limit"):
                cells.append(f"{v:.4f}")
            elif isinstance(v, float):
                cells.append(f"{v:.6f}")
            else:
                cells.append(str(v))
        w.writerow(cells)
    if buf.getvalue().encode() != cpath.read_bytes():
        bad.append("csv re-serialization")
    dt = time.perf_counter() - t0
    verdict(7, "format round-trips (50 Y4M clips, model file, CSV)", not bad and dt < 30,
            "all identical" if not bad else ", ".join(bad), dt)
