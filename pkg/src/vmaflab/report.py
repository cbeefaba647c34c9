"""Report artifacts: CSV tables, the (dSSIM, dVMAF) scatter plot, checkerboard
composites and luma histograms. Everything written here is deterministic."""

from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .enhance import HistEq, UnsharpMask
from .errors import ShapeError, WriteError
from .harness import EvalRecord, ParetoReport
from .media import Frame

CSV_HEADER = ("index", "family", "radius", "amount", "kernel_size", "clip_limit",
              "vmaf", "ssim", "psnr", "delta_vmaf", "delta_ssim", "encoded", "on_front")
SECOND_QUADRANT_SSIM_TOL = 0.005


def _params_cells(p) -> list[str]:
    if isinstance(p, UnsharpMask):
        return ["unsharp", f"{p.radius:.4f}", f"{p.amount:.4f}", "", ""]
    if isinstance(p, HistEq):
        return ["histeq", "", "", str(p.kernel_size), f"{p.clip_limit:.4f}"]
    return ["identity", "", "", "", ""]


def _row(i: int, r: EvalRecord, on_front: bool) -> list[str]:
    return [str(i), *_params_cells(r.params), f"{r.vmaf:.6f}", f"{r.ssim:.6f}", f"{r.psnr:.6f}",
            f"{r.delta_vmaf:.6f}", f"{r.delta_ssim:.6f}", str(int(r.encoded)), str(int(on_front))]


def _write_rows(path, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)  # RFC 4180: CRLF rows, minimal quoting
            w.writerow(CSV_HEADER)
            w.writerows(rows)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def emit_csv(report: ParetoReport, path) -> None:
    """Baseline first (index 0), then every evaluated candidate in evaluation order."""
    front = {id(r) for r in report.front}
    rows = [_row(0, report.baseline, False)]
    rows += [_row(i, r, id(r) in front) for i, r in enumerate(report.records, start=1)]
    _write_rows(path, rows)


def emit_front_csv(report: ParetoReport, path) -> None:
    order = {id(r): i for i, r in enumerate(report.records, start=1)}
    members = sorted(report.front, key=lambda r: (r.delta_ssim, r.delta_vmaf))
    _write_rows(path, [_row(order.get(id(r), 0), r, True) for r in members])


def read_csv(path) -> list[dict]:
    """Parse a report CSV back into typed rows."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            d = {}
            for k, v in row.items():
                if k == "family":
                    d[k] = v
                elif k in ("index", "kernel_size", "encoded", "on_front"):
                    d[k] = int(v) if v != "" else None
                else:
                    d[k] = float(v) if v != "" else None
            out.append(d)
    return out


def emit_timings(report: ParetoReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("index", "seconds"))
        w.writerow((0, f"{report.baseline.timing:.4f}"))
        for i, r in enumerate(report.records, start=1):
            w.writerow((i, f"{r.timing:.4f}"))


def best_second_quadrant(report: ParetoReport, ssim_tol: float = SECOND_QUADRANT_SSIM_TOL) -> EvalRecord | None:
    """Largest dVMAF among records whose SSIM dropped by at most ``ssim_tol``."""
    ok = [r for r in report.records if r.delta_ssim >= -ssim_tol and r.delta_vmaf > 0]
    if not ok:
        return None
    return max(ok, key=lambda r: (r.delta_vmaf, r.delta_ssim))


# ---------------------------------------------------------------- SVG

def _svg_write(path, body: Sequence[str], width: int, height: int) -> None:
    text = "\n".join([
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        *body,
        "</svg>",
        "",
    ])
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def _axis_range(values, default_half: float) -> tuple[float, float]:
    lo = min([0.0, *values])
    hi = max([0.0, *values])
    if hi - lo <= 0:
        return -default_half, default_half
    pad = 0.08 * (hi - lo)
    return lo - pad, hi + pad


def emit_scatter(report: ParetoReport, path, width: int = 640, height: int = 480) -> None:
    """dSSIM on x, dVMAF on y, axes through the origin.

    Circles mark unsharp-mask candidates and squares histogram equalization;
    Pareto members are filled, the rest hollow.
    """
    if not report.records:
        raise ValueError("report has no records to plot")
    m = 48
    xs = [r.delta_ssim for r in report.records]
    ys = [r.delta_vmaf for r in report.records]
    x0, x1 = _axis_range(xs, 0.01)
    y0, y1 = _axis_range(ys, 1.0)

    def px(x):
        return m + (x - x0) / (x1 - x0) * (width - 2 * m)

    def py(y):
        return height - m - (y - y0) / (y1 - y0) * (height - 2 * m)

    ox, oy = px(0.0), py(0.0)
    body = [
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line class="axis" x1="{m}" y1="{oy:.2f}" x2="{width - m}" y2="{oy:.2f}" stroke="black"/>',
        f'<line class="axis" x1="{ox:.2f}" y1="{m}" x2="{ox:.2f}" y2="{height - m}" stroke="black"/>',
        f'<text x="{width - m}" y="{height - 12}" text-anchor="end" font-size="12">delta SSIM</text>',
        f'<text x="12" y="{m - 16}" font-size="12">delta VMAF</text>',
        f'<text x="{m}" y="{height - 12}" font-size="10">{x0:.4g}</text>',
        f'<text x="{width - m}" y="{height - 26}" text-anchor="end" font-size="10">{x1:.4g}</text>',
        f'<text x="4" y="{height - m}" font-size="10">{y0:.3g}</text>',
        f'<text x="4" y="{m + 10}" font-size="10">{y1:.3g}</text>',
    ]
    front = {id(r) for r in report.front}
    for r, x, y in zip(report.records, xs, ys):
        cx, cy = px(x), py(y)
        fill = "#1f77b4" if id(r) in front else "none"
        title = escape(f"{r.params.as_dict()} dVMAF={r.delta_vmaf:.4f} dSSIM={r.delta_ssim:.6f}")
        if isinstance(r.params, HistEq):
            body.append(f'<rect class="marker histeq" x="{cx - 4:.2f}" y="{cy - 4:.2f}" width="8" height="8" '
                        f'fill="{fill}" stroke="#d62728"><title>{title}</title></rect>')
        else:
            body.append(f'<circle class="marker unsharp" cx="{cx:.2f}" cy="{cy:.2f}" r="4" '
                        f'fill="{fill}" stroke="#1f77b4"><title>{title}</title></circle>')
    _svg_write(path, body, width, height)


# ---------------------------------------------------------------- images

def _write_pgm(path, plane: np.ndarray, max_value: int) -> None:
    h, w = plane.shape
    header = f"P5\n{w} {h}\n{max_value}\n".encode("ascii")
    data = plane.astype(np.uint8 if max_value < 256 else ">u2").tobytes()
    try:
        Path(path).write_bytes(header + data)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, mx = int(parts[1]), int(parts[2]), int(parts[3])
    data = parts[4] if len(parts) > 4 else b""
    dt = np.uint8 if mx < 256 else np.dtype(">u2")
    return np.frombuffer(data[: w * h * np.dtype(dt).itemsize], dtype=dt).reshape(h, w)


def checkerboard(ref: np.ndarray, dist: np.ndarray, tile: int) -> np.ndarray:
    if ref.shape != dist.shape:
        raise ShapeError(f"checkerboard needs equal shapes, got {ref.shape} and {dist.shape}")
    if tile < 1:
        raise ValueError("tile must be >= 1")
    yy, xx = np.indices(ref.shape)
    take_dist = ((yy // tile) + (xx // tile)) % 2 == 1
    return np.where(take_dist, dist, ref)


def emit_checkerboard(ref_frame: Frame, dist_frame: Frame, tile: int, path) -> None:
    """Alternate ``tile``-sized blocks of the two lumas; the top-left block is the reference."""
    out = checkerboard(ref_frame.luma, dist_frame.luma, tile)
    _write_pgm(path, out, ref_frame.meta.max_value)


def luma_histogram(frame: Frame) -> np.ndarray:
    return np.bincount(frame.luma.ravel(), minlength=frame.meta.max_value + 1)


def emit_histogram(frame: Frame, path) -> None:
    """Write ``<path>.csv`` (level,count) and ``<path>.svg`` (bar chart)."""
    base = os.fspath(path)
    for suffix in (".csv", ".svg"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    counts = luma_histogram(frame)
    try:
        with open(base + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("level", "count"))
            w.writerows(enumerate(counts.tolist()))
    except OSError as exc:
        raise WriteError(f"cannot write {base}.csv: {exc}") from exc
    width, height, m = 560, 240, 20
    peak = max(1, int(counts.max()))
    bw = (width - 2 * m) / len(counts)
    body = [f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    for level, c in enumerate(counts):
        if c == 0:
            continue
        bh = c / peak * (height - 2 * m)
        body.append(f'<rect class="bar" x="{m + level * bw:.3f}" y="{height - m - bh:.3f}" '
                    f'width="{max(bw, 0.5):.3f}" height="{bh:.3f}" fill="#444"/>')
    body.append(f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>')
    _svg_write(base + ".svg", body, width, height)


def histogram_flatness(counts: np.ndarray) -> float:
    """Stddev of bin counts; lower is flatter."""
    return float(np.std(np.asarray(counts, dtype=np.float64)))
