"""``lab`` command line: search, score, compare, siti.

Exit codes: 0 success, 2 configuration error, 3 media error, 4 encoder error.
Failures print one JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import ConfigError, LabError, MediaError
from .media import Clip, VideoMeta, load_clip

log = logging.getLogger("vmaflab")

BUNDLED_PREFIX = "bundled:"


def _resolve(path: str, stack: contextlib.ExitStack) -> str:
    """Map ``bundled:low_contrast`` / ``bundled:contrasted`` to a real file."""
    if not path.startswith(BUNDLED_PREFIX):
        return path
    from .synthetic import bundled_clip_path

    try:
        res = bundled_clip_path(path[len(BUNDLED_PREFIX):])
    except KeyError:
        raise ConfigError(f"no bundled clip named {path!r}") from None
    return str(stack.enter_context(resources.as_file(res)))


def _raw_meta(text: str | None) -> VideoMeta | None:
    """Parse ``WxH[:chroma[:bitdepth[:fps]]]``, e.g. ``1920x1080:420:8:25``."""
    if text is None:
        return None
    try:
        parts = text.split(":")
        w, h = (int(v) for v in parts[0].lower().split("x"))
        fmt = parts[1] if len(parts) > 1 else "420"
        depth = int(parts[2]) if len(parts) > 2 else 8
        fps = Fraction(parts[3]) if len(parts) > 3 else Fraction(25)
        return VideoMeta(w, h, fps, depth, fmt)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad --raw-meta {text!r}: {exc}") from None


def _load(path: str, raw_meta: VideoMeta | None, stack: contextlib.ExitStack) -> Clip:
    path = _resolve(path, stack)
    if not Path(path).exists():
        raise MediaError(f"no such file: {path}")
    return load_clip(path, "raw" if raw_meta else None, raw_meta)


def cmd_search(args) -> int:
    from .harness import RunConfig, run_search
    from .nsga2 import NSGA2Config
    from .report import best_second_quadrant

    with contextlib.ExitStack() as stack:
        ref_path = _resolve(args.ref, stack)
        if not Path(ref_path).exists():
            raise MediaError(f"no such file: {ref_path}")
        try:
            nsga = NSGA2Config(pop_size=args.pop, generations=args.gens, seed=args.seed,
                               crossover_prob=args.pc, mutation_prob=args.pm, eta_c=args.eta_c, eta_m=args.eta_m)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        cfg = RunConfig(ref_path=ref_path, family=args.family, model_path=args.model,
                        encoder_cmd=args.encode_cmd, decoder_cmd=args.decode_cmd, bitrate=args.bitrate,
                        nsga=nsga, output_dir=args.out, subsample=args.subsample, workers=args.workers,
                        kernel_size=args.kernel_size)
        report = run_search(cfg)
    best = best_second_quadrant(report)
    summary = {
        "baseline": {"vmaf": report.baseline.vmaf, "ssim": report.baseline.ssim, "psnr": report.baseline.psnr},
        "evaluations": len(report.records),
        "front_size": len(report.front),
        "best_second_quadrant": None if best is None else {
            "params": best.params.as_dict(), "delta_vmaf": best.delta_vmaf, "delta_ssim": best.delta_ssim},
        "output_dir": args.out,
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_score(args) -> int:
    from .features import ENGINE_HASH
    from .metrics import psnr_clip, ssim_clip
    from .model import parse_model, score_clip_pair

    raw = _raw_meta(args.raw_meta)
    with contextlib.ExitStack() as stack:
        ref = _load(args.ref, raw, stack)
        dist = _load(args.dist, raw, stack)
    model = parse_model(args.model)
    if args.subsample > 1:
        ref, dist = ref.subsample(args.subsample), dist.subsample(args.subsample)
    scores = [score_clip_pair(ref, dist, model), ssim_clip(ref, dist), psnr_clip(ref, dist)]
    out = {"engine_hash": ENGINE_HASH, "frames": len(ref)}
    for s in scores:
        out[s.metric_id] = {"pooled": s.pooled}
        if args.per_frame:
            out[s.metric_id]["per_frame"] = list(s.per_frame)
    print(json.dumps(out, indent=2))
    return 0


def cmd_compare(args) -> int:
    from .report import emit_checkerboard, emit_histogram

    raw = _raw_meta(args.raw_meta)
    with contextlib.ExitStack() as stack:
        ref = _load(args.ref, raw, stack)
        dist = _load(args.dist, raw, stack)
    if not 0 <= args.frame < min(len(ref), len(dist)):
        raise ConfigError(f"frame {args.frame} out of range")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tile = args.tile or max(1, ref.meta.width // 8)
    emit_checkerboard(ref[args.frame], dist[args.frame], tile, out / f"checkerboard_{args.frame}.pgm")
    emit_histogram(ref[args.frame], out / f"histogram_ref_{args.frame}")
    emit_histogram(dist[args.frame], out / f"histogram_dist_{args.frame}")
    print(json.dumps({"output_dir": str(out), "frame": args.frame, "tile": tile}))
    return 0


def cmd_siti(args) -> int:
    from .metrics import si_ti

    with contextlib.ExitStack() as stack:
        clip = _load(args.ref, _raw_meta(args.raw_meta), stack)
    r = si_ti(clip)
    print(json.dumps({"si": r.si, "ti": r.ti, "ti_valid": r.ti_valid}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lab", description="VMAF tuning experiment toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="NSGA-II search for VMAF-raising transform parameters")
    s.add_argument("--ref", required=True, help="reference clip (.y4m) or bundled:<name>")
    s.add_argument("--family", choices=("unsharp", "histeq"), default="unsharp")
    s.add_argument("--model", help="SVR model file (default: bundled)")
    s.add_argument("--encode-cmd", help="encoder template with {input} {output} {bitrate}")
    s.add_argument("--decode-cmd", help="decoder template with {input} {output}")
    s.add_argument("--bitrate", type=int, help="target bits/second, e.g. 3000000")
    s.add_argument("--pop", type=int, default=24)
    s.add_argument("--gens", type=int, default=30)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pc", type=float, default=0.9, help="crossover probability")
    s.add_argument("--pm", type=float, default=None, help="per-gene mutation probability (default 1/n)")
    s.add_argument("--eta-c", type=float, default=15.0)
    s.add_argument("--eta-m", type=float, default=20.0)
    s.add_argument("--subsample", type=int, default=1, help="evaluate every k-th frame")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--kernel-size", type=int, default=8, help="histeq tiles per dimension")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_search)

    for name, fn, helptext in (("score", cmd_score, "VMAF / SSIM / PSNR of a clip pair"),
                               ("compare", cmd_compare, "checkerboard and histogram images")):
        c = sub.add_parser(name, help=helptext)
        c.add_argument("--ref", required=True)
        c.add_argument("--dist", required=True)
        c.add_argument("--raw-meta", help="WxH[:chroma[:bitdepth[:fps]]] for headerless input")
        c.set_defaults(func=fn)
    sc = sub.choices["score"]
    sc.add_argument("--model")
    sc.add_argument("--subsample", type=int, default=1)
    sc.add_argument("--per-frame", action="store_true")
    cp = sub.choices["compare"]
    cp.add_argument("--frame", type=int, default=0)
    cp.add_argument("--tile", type=int, default=0)
    cp.add_argument("--out", required=True)

    t = sub.add_parser("siti", help="spatial / temporal information of a clip")
    t.add_argument("--ref", required=True)
    t.add_argument("--raw-meta")
    t.set_defaults(func=cmd_siti)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except LabError as exc:
        err: LabError = exc
    except (ValueError, KeyError) as exc:
        err = ConfigError(str(exc))
    except OSError as exc:
        err = MediaError(str(exc))
    code = err.exit_code
    record = {"error": type(err).__name__, "message": str(err), "exit_code": code}
    if getattr(err, "stderr", ""):
        record["diagnostics"] = err.stderr
    print(json.dumps(record), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
