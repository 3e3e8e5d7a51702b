"""Grayscale images, PGM input/output, dataset tiling and synthetic textures."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError, PgmError, UnsupportedPgmError

log = logging.getLogger(__name__)

__all__ = [
    "GrayImage",
    "LabeledSample",
    "Dataset",
    "SplitMix64",
    "load_pgm",
    "parse_pgm",
    "write_pgm",
    "encode_pgm",
    "tile",
    "synth_texture",
    "SYNTH_KINDS",
    "load_dataset",
]


@dataclass(frozen=True, eq=False)
class GrayImage:
    """An immutable ``height x width`` grid of integer intensities in ``[0, max_level]``.

    ``pixels`` is stored as a read-only 2-D ``int64`` array; ``data`` gives the
    row-major flat view, so pixel ``j`` sits at ``(x, y) = (j % width, j // width)``.
    """

    pixels: np.ndarray
    max_level: int = 255

    def __post_init__(self):
        arr = np.array(self.pixels, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"pixels must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if arr.dtype.kind == "f":
            if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
                raise ValueError("intensities must be integers")
        elif arr.dtype.kind not in "iub":
            raise ValueError(f"unsupported pixel dtype {arr.dtype}")
        arr = arr.astype(np.int64)
        level = int(self.max_level)
        if level < 1:
            raise ValueError("max_level must be >= 1")
        if arr.min() < 0 or arr.max() > level:
            raise ValueError(f"intensities must lie in [0, {level}]")
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)
        object.__setattr__(self, "max_level", level)

    @classmethod
    def from_flat(cls, width: int, height: int, data: Sequence[int], max_level: int = 255):
        data = np.asarray(data)
        if data.size != width * height:
            raise ValueError(f"expected {width * height} intensities, got {data.size}")
        return cls(data.reshape(height, width), max_level)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self):
        return self.pixels.shape

    @property
    def data(self) -> np.ndarray:
        return self.pixels.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.max_level == other.max_level and np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    def __repr__(self):
        return f"GrayImage(width={self.width}, height={self.height}, max_level={self.max_level})"


@dataclass(frozen=True)
class LabeledSample:
    image: GrayImage
    class_id: int
    source_path: str
    tile_index: int = 0


@dataclass
class Dataset:
    samples: list = field(default_factory=list)
    class_names: list = field(default_factory=list)

    def __post_init__(self):
        for s in self.samples:
            if not 0 <= s.class_id < len(self.class_names):
                raise DatasetError(f"class id {s.class_id} out of range for {self.source_desc(s)}")

    @staticmethod
    def source_desc(sample):
        return f"{sample.source_path}#{sample.tile_index}"

    def __len__(self):
        return len(self.samples)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.class_id for s in self.samples], dtype=np.int64)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=len(self.class_names))


# ---------------------------------------------------------------------------
# PGM
# ---------------------------------------------------------------------------

_WHITESPACE = b" \t\r\n\v\f"


def _header_token(buf: bytes, pos: int):
    """Return ``(token, start, end)`` of the next header token, skipping comments."""
    n = len(buf)
    while pos < n:
        c = buf[pos : pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            while pos < n and buf[pos : pos + 1] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and buf[pos : pos + 1] not in _WHITESPACE and buf[pos : pos + 1] != b"#":
        pos += 1
    return buf[start:pos], start, pos


def _header_int(buf, pos, what, path):
    tok, start, end = _header_token(buf, pos)
    if not tok:
        raise PgmError(f"unexpected end of header while reading {what}", start, path)
    if not tok.isdigit():
        raise PgmError(f"invalid {what} {tok[:16]!r}", start, path)
    return int(tok), start, end


def parse_pgm(buf: bytes, path=None) -> GrayImage:
    """Decode a P2 (ASCII) or P5 (binary) PGM held in memory."""
    magic = buf[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"bad magic number {magic!r}, expected P2 or P5", 0, path)
    pos = 2
    if len(buf) > 2 and buf[2:3] not in _WHITESPACE and buf[2:3] != b"#":
        raise PgmError("missing whitespace after magic number", 2, path)
    width, _, pos = _header_int(buf, pos, "width", path)
    height, _, pos = _header_int(buf, pos, "height", path)
    maxval, mstart, pos = _header_int(buf, pos, "maxval", path)
    if width < 1 or height < 1:
        raise PgmError(f"invalid dimensions {width}x{height}", 2, path)
    if maxval > 65535:
        raise UnsupportedPgmError(f"maxval {maxval} exceeds 65535", mstart, path)
    if maxval < 1:
        raise PgmError("maxval must be >= 1", mstart, path)
    count = width * height

    if magic == b"P5":
        if pos >= len(buf) or buf[pos : pos + 1] not in _WHITESPACE:
            raise PgmError("missing whitespace after maxval", pos, path)
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        if len(buf) - pos < need:
            raise PgmError(
                f"truncated pixel data: need {need} bytes, have {len(buf) - pos}", len(buf), path
            )
        values = np.frombuffer(buf, dtype=dtype, count=count, offset=pos).astype(np.int64)
        if values.max() > maxval:
            bad = int(np.argmax(values > maxval))
            raise PgmError(f"sample exceeds maxval {maxval}", pos + bad * dtype.itemsize, path)
    else:
        values = np.empty(count, dtype=np.int64)
        for i in range(count):
            tok, start, pos = _header_token(buf, pos)
            if not tok:
                raise PgmError(f"truncated pixel data: got {i} of {count} samples", start, path)
            if not tok.isdigit():
                raise PgmError(f"invalid sample {tok[:16]!r}", start, path)
            v = int(tok)
            if v > maxval:
                raise PgmError(f"sample {v} exceeds maxval {maxval}", start, path)
            values[i] = v
    return GrayImage(values.reshape(height, width), maxval)


def load_pgm(path) -> GrayImage:
    path = Path(path)
    return parse_pgm(path.read_bytes(), path)


def encode_pgm(image: GrayImage, binary: bool = True) -> bytes:
    header = f"{'P5' if binary else 'P2'}\n{image.width} {image.height}\n{image.max_level}\n"
    if binary:
        dtype = ">u2" if image.max_level > 255 else "u1"
        return header.encode("ascii") + image.pixels.astype(dtype).tobytes()
    rows = "\n".join(" ".join(str(v) for v in row) for row in image.pixels.tolist())
    return (header + rows + "\n").encode("ascii")


def write_pgm(image: GrayImage, path, binary: bool = True) -> None:
    Path(path).write_bytes(encode_pgm(image, binary))


# ---------------------------------------------------------------------------
# Tiling
# ---------------------------------------------------------------------------


def tile(image: GrayImage, tile_w: int, tile_h: int) -> list:
    """Cut non-overlapping tiles row-major from the top-left; partial edge tiles are dropped."""
    if tile_w < 1 or tile_h < 1:
        raise ValueError("tile dimensions must be positive")
    if tile_w > image.width or tile_h > image.height:
        raise ValueError(
            f"tile {tile_w}x{tile_h} larger than image {image.width}x{image.height}"
        )
    out = []
    for ty in range(image.height // tile_h):
        for tx in range(image.width // tile_w):
            block = image.pixels[ty * tile_h : (ty + 1) * tile_h, tx * tile_w : (tx + 1) * tile_w]
            out.append(GrayImage(block, image.max_level))
    return out


# ---------------------------------------------------------------------------
# Deterministic PRNG and synthetic textures
# ---------------------------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """SplitMix64 in counter form.

    Output ``i`` (0-based) of a stream seeded with ``s`` is
    ``mix(s + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)`` where ``mix`` is the
    standard SplitMix64 finaliser. All arithmetic is unsigned 64-bit, so the
    stream is identical on every platform and can be generated in bulk.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK64

    def next_u64(self, n: int) -> np.ndarray:
        with np.errstate(over="ignore"):
            steps = np.arange(1, n + 1, dtype=np.uint64) * _GOLDEN
            z = _mix64(np.uint64(self.state) + steps)
        self.state = (self.state + n * int(_GOLDEN)) & _MASK64
        return z

    def integers(self, low: int, high: int, n: int) -> np.ndarray:
        """``n`` integers in the closed range ``[low, high]`` (modulo reduction)."""
        span = high - low + 1
        if span < 1:
            raise ValueError("empty range")
        return (self.next_u64(n) % np.uint64(span)).astype(np.int64) + low

    def uniform(self, n: int) -> np.ndarray:
        """``n`` floats in ``[0, 1)`` built from the top 53 bits."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def fork(self, key: int) -> "SplitMix64":
        with np.errstate(over="ignore"):
            sub = _mix64(np.uint64(self.state) ^ _mix64(np.uint64(int(key) & _MASK64) + _GOLDEN))
        return SplitMix64(int(sub))


SYNTH_KINDS = ("checker", "stripes", "blob-noise", "gradient-noise")


def _blob_field(rng: SplitMix64, size: int, period: int, offset) -> np.ndarray:
    # smoothstep-interpolated value noise on a lattice with spacing `period`
    cells = (size + offset[0] + offset[1]) // period + 2
    lattice = rng.uniform(cells * cells).reshape(cells, cells)
    coords = (np.arange(size) + np.asarray(offset)[:, None]) / period
    ix, iy = coords[0].astype(np.int64), coords[1].astype(np.int64)
    fx, fy = coords[0] - ix, coords[1] - iy
    sx, sy = fx * fx * (3 - 2 * fx), fy * fy * (3 - 2 * fy)
    y0, x0 = iy[:, None], ix[None, :]
    top = lattice[y0, x0] * (1 - sx) + lattice[y0, x0 + 1] * sx
    bot = lattice[y0 + 1, x0] * (1 - sx) + lattice[y0 + 1, x0 + 1] * sx
    return 255.0 * (top * (1 - sy[:, None]) + bot * sy[:, None])


def synth_texture(
    kind: str,
    period: int,
    noise_amp: int,
    seed: int,
    size: int,
    offset: tuple = (0, 0),
) -> GrayImage:
    """Generate a deterministic 8-bit ``size x size`` test texture.

    Kinds:

    ``checker``
        ``period x period`` blocks alternating 0/255, top-left block black.
    ``stripes``
        vertical 0/255 bands ``period`` pixels wide.
    ``blob-noise``
        seeded value noise on a lattice of spacing ``period``.
    ``gradient-noise``
        diagonal sawtooth ramp repeating every ``period`` pixels.

    Uniform integer noise in ``[-noise_amp, noise_amp]`` drawn from
    :class:`SplitMix64` is added and the result clipped to ``[0, 255]``.
    ``offset`` shifts the pattern phase by ``(dx, dy)`` pixels.
    """
    if kind not in SYNTH_KINDS:
        raise ValueError(f"unknown texture kind {kind!r}; choose from {SYNTH_KINDS}")
    if size < 8:
        raise ValueError("size must be >= 8")
    if period < 1:
        raise ValueError("period must be >= 1")
    if noise_amp < 0:
        raise ValueError("noise_amp must be >= 0")
    dx, dy = (int(v) for v in offset)
    if dx < 0 or dy < 0:
        raise ValueError("offset must be non-negative")

    root = SplitMix64(seed)
    ys, xs = np.mgrid[0:size, 0:size]
    xs, ys = xs + dx, ys + dy
    if kind == "checker":
        base = ((xs // period + ys // period) % 2) * 255.0
    elif kind == "stripes":
        base = ((xs // period) % 2) * 255.0
    elif kind == "gradient-noise":
        base = ((xs + ys) % period) * (255.0 / period)
    else:
        base = _blob_field(root.fork(1), size, period, (dx, dy))
    img = np.floor(base + 0.5).astype(np.int64)
    if noise_amp > 0:
        img = img + root.fork(2).integers(-noise_amp, noise_amp, size * size).reshape(size, size)
    return GrayImage(np.clip(img, 0, 255), 255)


# ---------------------------------------------------------------------------
# Dataset directories
# ---------------------------------------------------------------------------


def _iter_class_dirs(root: Path) -> Iterable[Path]:
    return sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name)


def load_dataset(root, tile_size: tuple | None = None, skip_bad: bool = False) -> Dataset:
    """Read ``root/<class_name>/*.pgm`` into a :class:`Dataset`.

    Class ids follow lexicographic class-name order; samples are ordered by
    class, then file name, then tile index. ``source_path`` is stored relative
    to ``root`` with forward slashes.
    """
    root = Path(root)
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} is not a directory")
    class_names, samples = [], []
    for cdir in _iter_class_dirs(root):
        files = sorted(p for p in cdir.iterdir() if p.is_file() and p.suffix.lower() == ".pgm")
        if not files:
            continue
        cid = len(class_names)
        class_names.append(cdir.name)
        for f in files:
            rel = os.path.relpath(f, root).replace(os.sep, "/")
            try:
                img = load_pgm(f)
                parts = tile(img, *tile_size) if tile_size else [img]
            except (PgmError, ValueError, OSError) as exc:
                if not skip_bad:
                    raise DatasetError(f"cannot use {f}: {exc}") from exc
                log.warning("skipping %s: %s", f, exc)
                continue
            samples.extend(LabeledSample(t, cid, rel, i) for i, t in enumerate(parts))
    if not samples:
        raise DatasetError(f"no PGM images found under {root}")
    return Dataset(samples, class_names)
