"""End-to-end search pipeline: baseline, parameter search, optional external
encoding, and report assembly."""

from __future__ import annotations

import json
import logging
import shlex
import shutil
import subprocess
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .enhance import (DEFAULT_KERNEL_SIZE, HISTEQ_BOUNDS, UNSHARP_BOUNDS, Identity,
                      TransformParams, apply_transform, params_from_genes)
from .errors import ConfigError, EncoderError
from .features import ENGINE_CONFIG, ENGINE_HASH
from .media import Clip, load_clip, save_clip
from .metrics import psnr_clip, ssim_clip
from .model import MODEL_VERSION, VmafModel, parse_model, score_clip_pair
from .nsga2 import Bounds, NSGA2Config, dominates, evolve

log = logging.getLogger(__name__)

GENE_GRID = 1e-4
FAMILIES = ("unsharp", "histeq")


def default_bounds(family: str) -> Bounds:
    if family == "unsharp":
        b = UNSHARP_BOUNDS
        return Bounds((b["radius"][0], b["amount"][0]), (b["radius"][1], b["amount"][1]), ("radius", "amount"))
    if family == "histeq":
        lo, hi = HISTEQ_BOUNDS["clip_limit"]
        return Bounds((lo,), (hi,), ("clip_limit",))
    raise ConfigError(f"unknown transform family {family!r}")


@dataclass
class RunConfig:
    ref_path: str | None = None
    family: str = "unsharp"
    model_path: str | None = None
    encoder_cmd: str | None = None
    decoder_cmd: str | None = None
    bitrate: int | None = None
    nsga: NSGA2Config = field(default_factory=NSGA2Config)
    output_dir: str = "lab-out"
    subsample: int = 1
    workers: int = 1
    kernel_size: int = DEFAULT_KERNEL_SIZE
    bounds: Bounds | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if (self.encoder_cmd is None) != (self.bitrate is None):
            raise ConfigError("encoding needs both an encoder command and a bitrate")
        if self.decoder_cmd is not None and self.encoder_cmd is None:
            raise ConfigError("a decoder command needs an encoder command")
        if self.subsample < 1:
            raise ConfigError("subsample must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def seed(self) -> int:
        return self.nsga.seed

    @property
    def encoding(self) -> bool:
        return self.encoder_cmd is not None

    def search_bounds(self) -> Bounds:
        return self.bounds if self.bounds is not None else default_bounds(self.family)

    def echo(self) -> dict:
        d = {
            "ref_path": self.ref_path,
            "family": self.family,
            "model_path": self.model_path or "<bundled>",
            "encoder_cmd": self.encoder_cmd,
            "decoder_cmd": self.decoder_cmd,
            "bitrate": self.bitrate,
            "optimizer": asdict(self.nsga),
            "optimizer_defaults_note": "population, generation and operator settings are tool defaults unless overridden on the command line",
            "subsample": self.subsample,
            "subsampled": self.subsample > 1,
            "histeq_kernel_size": self.kernel_size,
            "histeq_kernel_size_meaning": "tiles per dimension",
            "transform_plane": "luma",
            "bounds": {"low": list(self.search_bounds().low), "high": list(self.search_bounds().high),
                       "names": list(self.search_bounds().names)},
        }
        return d


@dataclass(frozen=True)
class EvalRecord:
    params: TransformParams
    vmaf: float
    ssim: float
    psnr: float
    delta_vmaf: float
    delta_ssim: float
    encoded: bool
    timing: float = 0.0

    def objectives(self) -> tuple[float, float]:
        return (-self.delta_vmaf, -self.delta_ssim)


@dataclass
class ParetoReport:
    baseline: EvalRecord
    records: list[EvalRecord]
    front: list[EvalRecord]
    config: dict
    engine_hash: str = ENGINE_HASH


# ---------------------------------------------------------------- encoding

def _check_template(template: str, what: str) -> list[str]:
    for ph in ("{input}", "{output}"):
        if ph not in template:
            raise ConfigError(f"{what} template lacks the {ph} placeholder")
    return shlex.split(template)


def _run(template: str, what: str, **subs) -> None:
    argv = [tok.format(**subs) for tok in shlex.split(template)]
    log.debug("running %s: %s", what, argv)
    try:
        proc = subprocess.run(argv, capture_output=True, text=True)
    except OSError as exc:
        raise EncoderError(f"{what} could not start: {exc}") from exc
    if proc.returncode != 0:
        raise EncoderError(f"{what} exited with status {proc.returncode}",
                           returncode=proc.returncode, stderr=proc.stderr[-4000:])


def encode_external(clip: Clip, cfg: RunConfig) -> Clip:
    """Round-trip ``clip`` through the configured external encoder / decoder.

    Templates are split shell-style and ``{input}``, ``{output}`` and
    ``{bitrate}`` are substituted per token; no shell is involved. Without a
    decoder template the encoder must itself write Y4M.
    """
    if cfg.encoder_cmd is None:
        raise ConfigError("no encoder command configured")
    _check_template(cfg.encoder_cmd, "encoder")
    if cfg.decoder_cmd is not None:
        _check_template(cfg.decoder_cmd, "decoder")
    tmp = Path(tempfile.mkdtemp(prefix="vmaflab-enc-"))
    src = tmp / "input.y4m"
    encoded = tmp / ("encoded.264" if cfg.decoder_cmd else "encoded.y4m")
    decoded = tmp / "decoded.y4m"
    save_clip(clip, src, "y4m")
    _run(cfg.encoder_cmd, "encoder", input=src, output=encoded, bitrate=cfg.bitrate)
    if cfg.decoder_cmd is not None:
        _run(cfg.decoder_cmd, "decoder", input=encoded, output=decoded, bitrate=cfg.bitrate)
    else:
        decoded = encoded
    try:
        out = load_clip(decoded, "y4m")
    except FileNotFoundError as exc:
        raise EncoderError(f"codec produced no output at {decoded}") from exc
    if len(out) != len(clip) or out.meta.width != clip.meta.width or out.meta.height != clip.meta.height:
        raise EncoderError(f"decoded clip {out.meta.width}x{out.meta.height}x{len(out)} does not match "
                           f"input {clip.meta.width}x{clip.meta.height}x{len(clip)}")
    shutil.rmtree(tmp, ignore_errors=True)
    if out.meta != clip.meta:
        # codecs commonly hand back 4:2:0; metrics only read luma
        out = Clip(clip.meta, tuple(clip[i].with_luma(f.luma) for i, f in enumerate(out)))
    return out


# ---------------------------------------------------------------- evaluation

def evaluate_candidate(ref: Clip, params: TransformParams, cfg: RunConfig, model: VmafModel,
                       baseline: EvalRecord | None = None) -> EvalRecord:
    """Score one transform. Without ``baseline`` the record is its own baseline (zero deltas)."""
    t0 = time.perf_counter()
    dist = apply_transform(ref, params)
    if cfg.encoding:
        dist = encode_external(dist, cfg)
    vmaf = score_clip_pair(ref, dist, model).pooled
    ssim = ssim_clip(ref, dist).pooled
    psnr = psnr_clip(ref, dist).pooled
    if baseline is None:
        dv = ds = 0.0
    else:
        dv, ds = vmaf - baseline.vmaf, ssim - baseline.ssim
    return EvalRecord(params, vmaf, ssim, psnr, dv, ds, cfg.encoding, time.perf_counter() - t0)


def evaluate_baseline(ref: Clip, cfg: RunConfig, model: VmafModel) -> EvalRecord:
    return evaluate_candidate(ref, Identity(), cfg, model)


def gene_key(genes: Sequence[float]) -> tuple[int, ...]:
    return tuple(int(round(g / GENE_GRID)) for g in genes)


def pareto_subset(records: Sequence[EvalRecord]) -> list[EvalRecord]:
    objs = [r.objectives() for r in records]
    return [r for i, r in enumerate(records)
            if not any(dominates(objs[j], objs[i]) for j in range(len(records)) if j != i)]


def load_reference(cfg: RunConfig) -> Clip:
    if cfg.ref_path is None:
        raise ConfigError("no reference clip given")
    return load_clip(cfg.ref_path).subsample(cfg.subsample)


def search(ref: Clip, cfg: RunConfig, model: VmafModel) -> ParetoReport:
    """NSGA-II search over the configured family; no file output."""
    baseline = evaluate_baseline(ref, cfg, model)
    bounds = cfg.search_bounds()
    memo: dict[tuple[int, ...], EvalRecord] = {}
    lock = threading.Lock()

    def evaluate(genes):
        key = gene_key(genes)
        with lock:
            hit = memo.get(key)
        if hit is None:
            snapped = np.clip(np.array(key) * GENE_GRID, bounds.low, bounds.high)
            params = params_from_genes(cfg.family, snapped, cfg.kernel_size)
            hit = evaluate_candidate(ref, params, cfg, model, baseline)
            with lock:
                hit = memo.setdefault(key, hit)
        return hit.objectives()

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            result = evolve(evaluate, bounds, cfg.nsga, map_fn=pool.map)
    else:
        result = evolve(evaluate, bounds, cfg.nsga)

    records, seen = [], set()
    for ind in result.history:
        key = gene_key(ind.genes)
        if key in memo and key not in seen:
            seen.add(key)
            records.append(memo[key])
    echo = cfg.echo()
    echo.update(engine_hash=ENGINE_HASH, engine_config=ENGINE_CONFIG, model_version=MODEL_VERSION,
                kernel_backend=_kernels.BACKEND, frames_evaluated=len(ref),
                chroma_format=ref.meta.chroma_format, evaluations=len(records))
    return ParetoReport(baseline, records, pareto_subset(records), echo)


def run_search(cfg: RunConfig) -> ParetoReport:
    """Full search run: search, then write every artifact into ``cfg.output_dir``."""
    from . import report as rp

    ref = load_reference(cfg)
    model = parse_model(cfg.model_path)
    result = search(ref, cfg, model)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rp.emit_csv(result, out / "report.csv")
    rp.emit_front_csv(result, out / "front.csv")
    rp.emit_scatter(result, out / "scatter.svg")
    rp.emit_timings(result, out / "timing.csv")
    (out / "config.echo").write_text(json.dumps(result.config, indent=2, sort_keys=True, default=str) + "\n")
    best = rp.best_second_quadrant(result)
    if best is not None:
        dist = apply_transform(ref[:1], best.params)
        rp.emit_checkerboard(ref[0], dist[0], max(8, ref.meta.width // 8), out / "checkerboard.pgm")
        rp.emit_histogram(ref[0], out / "histogram_ref")
        rp.emit_histogram(dist[0], out / "histogram_best")
    return result
