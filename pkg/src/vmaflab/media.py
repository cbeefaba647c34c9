"""Uncompressed video containers and Y4M / raw planar YUV readers and writers.

Samples are kept as unsigned integer planes (uint8 for 8-bit, uint16 for
10-bit). Metrics only look at luma; chroma is carried through untouched.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError, SizeError, UnsupportedFormat, WriteError

CHROMA_FORMATS = ("420", "422", "444", "luma_only")

# Y4M colour tags -> (chroma_format, bit_depth)
_Y4M_TAGS = {
    "420": ("420", 8),
    "420jpeg": ("420", 8),
    "420paldv": ("420", 8),
    "420mpeg2": ("420", 8),
    "422": ("422", 8),
    "444": ("444", 8),
    "mono": ("luma_only", 8),
    "420p10": ("420", 10),
    "422p10": ("422", 10),
    "444p10": ("444", 10),
    "mono10": ("luma_only", 10),
}

# Written into the header when a luma-only clip is stored with synthesized
# chroma, so that loading restores the original layout.
_LUMA_ONLY_XTAG = "XVMAFLAB=LUMA_ONLY"


@dataclass(frozen=True)
class VideoMeta:
    width: int
    height: int
    frame_rate: Fraction = Fraction(25, 1)
    bit_depth: int = 8
    chroma_format: str = "420"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"invalid dimensions {self.width}x{self.height}")
        if self.bit_depth not in (8, 10):
            raise ValueError(f"bit_depth must be 8 or 10, got {self.bit_depth}")
        if self.chroma_format not in CHROMA_FORMATS:
            raise UnsupportedFormat(f"unknown chroma format {self.chroma_format!r}")
        if self.chroma_format == "420" and (self.width % 2 or self.height % 2):
            raise ValueError("4:2:0 requires even width and height")
        object.__setattr__(self, "frame_rate", Fraction(self.frame_rate))

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.uint8 if self.bit_depth == 8 else np.uint16)

    @property
    def chroma_shape(self) -> tuple[int, int] | None:
        return _chroma_shape(self.width, self.height, self.chroma_format)

    @property
    def frame_bytes(self) -> int:
        n = self.width * self.height
        cs = self.chroma_shape
        if cs is not None:
            n += 2 * cs[0] * cs[1]
        return n * self.dtype.itemsize


def _chroma_shape(width: int, height: int, fmt: str) -> tuple[int, int] | None:
    if fmt == "luma_only":
        return None
    if fmt == "420":
        return ((height + 1) // 2, (width + 1) // 2)
    if fmt == "422":
        return (height, (width + 1) // 2)
    return (height, width)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Frame:
    luma: np.ndarray
    meta: VideoMeta
    chroma_u: np.ndarray | None = None
    chroma_v: np.ndarray | None = None

    def __post_init__(self):
        m = self.meta
        luma = np.asarray(self.luma)
        if luma.shape != (m.height, m.width):
            raise ValueError(f"luma shape {luma.shape} != {(m.height, m.width)}")
        if luma.size and (luma.min() < 0 or luma.max() > m.max_value):
            raise ValueError(f"luma samples outside [0, {m.max_value}]")
        object.__setattr__(self, "luma", _frozen(luma.astype(m.dtype, copy=False)))
        cs = m.chroma_shape
        if cs is None:
            object.__setattr__(self, "chroma_u", None)
            object.__setattr__(self, "chroma_v", None)
            return
        for name in ("chroma_u", "chroma_v"):
            plane = getattr(self, name)
            if plane is None:
                plane = np.full(cs, 1 << (m.bit_depth - 1), dtype=m.dtype)
            plane = np.asarray(plane)
            if plane.shape != cs:
                raise ValueError(f"{name} shape {plane.shape} != {cs}")
            if plane.size and plane.max() > m.max_value:
                raise ValueError(f"{name} samples outside [0, {m.max_value}]")
            object.__setattr__(self, name, _frozen(plane.astype(m.dtype, copy=False)))

    def with_luma(self, luma: np.ndarray) -> Frame:
        """Same frame with the luma plane replaced; chroma is shared."""
        return Frame(luma, self.meta, self.chroma_u, self.chroma_v)

    def planes(self) -> list[np.ndarray]:
        if self.chroma_u is None:
            return [self.luma]
        return [self.luma, self.chroma_u, self.chroma_v]

    def same_samples(self, other: Frame) -> bool:
        if self.meta != other.meta:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.planes(), other.planes()))


@dataclass(frozen=True, eq=False)
class Clip:
    meta: VideoMeta
    frames: tuple[Frame, ...] = field(default_factory=tuple)

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("a clip needs at least one frame")
        for f in frames:
            if f.meta != self.meta:
                raise ValueError("all frames must share the clip metadata")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Clip(self.meta, self.frames[i])
        return self.frames[i]

    def __iter__(self):
        return iter(self.frames)

    def subsample(self, k: int) -> Clip:
        """Every k-th frame, starting with the first."""
        if k < 1:
            raise ValueError("subsample step must be >= 1")
        return self[::k]

    def same_samples(self, other: Clip) -> bool:
        return (
            self.meta == other.meta
            and len(self) == len(other)
            and all(a.same_samples(b) for a, b in zip(self, other))
        )

    @classmethod
    def from_luma(cls, planes: Iterable[np.ndarray], meta: VideoMeta | None = None, **meta_kw) -> Clip:
        planes = [np.asarray(p) for p in planes]
        if meta is None:
            h, w = planes[0].shape
            meta_kw.setdefault("chroma_format", "luma_only")
            meta = VideoMeta(width=w, height=h, **meta_kw)
        return cls(meta, tuple(Frame(p, meta) for p in planes))


# ---------------------------------------------------------------- Y4M

def _parse_y4m_header(line: bytes) -> tuple[VideoMeta, bool]:
    tokens = line.split(b" ")
    if tokens[0] != b"YUV4MPEG2":
        raise ParseError("missing YUV4MPEG2 signature", 0)
    width = height = None
    rate = Fraction(25, 1)
    tag = "420jpeg"
    luma_only_marker = False
    offset = len(tokens[0]) + 1
    for tok in tokens[1:]:
        if not tok:
            offset += 1
            continue
        try:
            key, val = chr(tok[0]), tok[1:].decode("ascii")
        except UnicodeDecodeError:
            raise ParseError("non-ASCII header token", offset) from None
        try:
            if key == "W":
                width = int(val)
            elif key == "H":
                height = int(val)
            elif key == "F":
                num, den = val.split(":")
                rate = Fraction(int(num), int(den))
            elif key == "I":
                if val not in ("p", "?"):
                    raise UnsupportedFormat(f"interlaced Y4M (I{val}) is not supported")
            elif key == "C":
                if val not in _Y4M_TAGS:
                    raise UnsupportedFormat(f"unsupported Y4M colour space C{val}")
                tag = val
            elif key == "X":
                luma_only_marker |= "X" + val == _LUMA_ONLY_XTAG
            elif key == "A":
                pass
            else:
                raise ParseError(f"unknown header token {tok!r}", offset)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad header token {tok!r}", offset) from None
        offset += len(tok) + 1
    if width is None or height is None:
        raise ParseError("header lacks W or H", len(line))
    fmt, depth = _Y4M_TAGS[tag]
    if luma_only_marker:
        fmt = "luma_only"
    try:
        meta = VideoMeta(width, height, rate, depth, fmt)
    except ValueError as exc:
        raise ParseError(str(exc), 0) from None
    return meta, luma_only_marker


def _read_planes(buf: memoryview, pos: int, meta: VideoMeta,
                 chroma_shape: tuple[int, int] | None) -> tuple[Frame, int]:
    dt = np.dtype(meta.dtype).newbyteorder("<")
    shapes = [(meta.height, meta.width)]
    if chroma_shape is not None:
        shapes += [chroma_shape] * 2
    planes = []
    for shape in shapes:
        n = shape[0] * shape[1] * dt.itemsize
        if pos + n > len(buf):
            raise SizeError("truncated frame payload", pos + n, len(buf))
        planes.append(np.frombuffer(buf[pos:pos + n], dtype=dt).reshape(shape).astype(meta.dtype))
        pos += n
    for p in planes:
        if meta.bit_depth == 10 and p.size and p.max() > meta.max_value:
            raise ParseError("10-bit sample exceeds 1023", pos)
    if meta.chroma_format == "luma_only":
        return Frame(planes[0], meta), pos
    return Frame(planes[0], meta, planes[1], planes[2]), pos


def _load_y4m(data: bytes) -> Clip:
    nl = data.find(b"\n")
    if nl < 0:
        raise ParseError("unterminated Y4M header", len(data))
    meta, luma_only = _parse_y4m_header(data[:nl])
    # luma-only clips are stored with synthesized 4:2:0 chroma, skipped on read
    chroma_shape = _chroma_shape(meta.width, meta.height, "420") if luma_only else meta.chroma_shape
    buf = memoryview(data)
    pos = nl + 1
    frames = []
    while pos < len(data):
        if data[pos:pos + 5] != b"FRAME":
            raise ParseError("expected FRAME marker", pos)
        end = data.find(b"\n", pos)
        if end < 0:
            raise ParseError("unterminated FRAME header", pos)
        frame, pos = _read_planes(buf, end + 1, meta, chroma_shape)
        frames.append(frame)
    if not frames:
        raise ParseError("Y4M stream contains no frames", pos)
    return Clip(meta, tuple(frames))


def _y4m_tag(meta: VideoMeta) -> str:
    fmt = "420" if meta.chroma_format == "luma_only" else meta.chroma_format
    return fmt + ("p10" if meta.bit_depth == 10 else "")


def _plane_bytes(plane: np.ndarray, meta: VideoMeta) -> bytes:
    if meta.bit_depth == 8:
        return plane.astype(np.uint8).tobytes()
    return plane.astype("<u2").tobytes()


def _encode_y4m(clip: Clip) -> bytes:
    m = clip.meta
    rate = m.frame_rate
    header = f"YUV4MPEG2 W{m.width} H{m.height} F{rate.numerator}:{rate.denominator} Ip A1:1 C{_y4m_tag(m)}"
    neutral = None
    if m.chroma_format == "luma_only":
        header += " " + _LUMA_ONLY_XTAG
        cs = _chroma_shape(m.width, m.height, "420")
        neutral = _plane_bytes(np.full(cs, 1 << (m.bit_depth - 1)), m) * 2
    out = [header.encode("ascii"), b"\n"]
    for f in clip:
        out.append(b"FRAME\n")
        out.append(_plane_bytes(f.luma, m))
        if neutral is not None:
            out.append(neutral)
        else:
            out.append(_plane_bytes(f.chroma_u, m))
            out.append(_plane_bytes(f.chroma_v, m))
    return b"".join(out)


# ---------------------------------------------------------------- raw

def _load_raw(data: bytes, meta: VideoMeta) -> Clip:
    per = meta.frame_bytes
    if len(data) == 0 or len(data) % per:
        raise SizeError(f"raw file size is not a multiple of the {per}-byte frame size", per * max(1, -(-len(data) // per)), len(data))
    buf = memoryview(data)
    frames = []
    pos = 0
    while pos < len(data):
        frame, pos = _read_planes(buf, pos, meta, meta.chroma_shape)
        frames.append(frame)
    return Clip(meta, tuple(frames))


def _encode_raw(clip: Clip) -> bytes:
    return b"".join(_plane_bytes(p, clip.meta) for f in clip for p in f.planes())


def _guess_format(path: Path, data: bytes) -> str:
    if data[:9] == b"YUV4MPEG2":
        return "y4m"
    if path.suffix.lower() == ".y4m":
        return "y4m"
    return "raw"


def load_clip(path: str | os.PathLike, format_hint: str | None = None,
              raw_meta: VideoMeta | None = None) -> Clip:
    """Read a Y4M or headerless planar YUV file.

    Raw files need ``raw_meta``; the file size must be a whole number of
    frames. A truncated final frame is an error, never dropped.
    """
    path = Path(path)
    data = path.read_bytes()
    fmt = format_hint or _guess_format(path, data)
    if fmt == "y4m":
        return _load_y4m(data)
    if fmt == "raw":
        if raw_meta is None:
            raise ValueError("raw input requires raw_meta")
        return _load_raw(data, raw_meta)
    raise UnsupportedFormat(f"unknown container {fmt!r}")


def save_clip(clip: Clip, path: str | os.PathLike, format: str = "y4m") -> None:
    if format == "y4m":
        payload = _encode_y4m(clip)
    elif format == "raw":
        payload = _encode_raw(clip)
    else:
        raise UnsupportedFormat(f"unknown container {format!r}")
    try:
        Path(path).write_bytes(payload)
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def luma_stack(clip: Clip | Sequence[Frame]) -> list[np.ndarray]:
    return [f.luma.astype(np.float64) for f in clip]
