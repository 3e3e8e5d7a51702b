"""Directed pixel networks and their degree evolution over the connection radius.

Every pixel is a vertex. For a radius ``r`` two pixels at Euclidean distance
``0 < d <= r`` are linked by an edge pointing towards the brighter one; equal
intensities give a pair of opposite edges (``ties="bidirectional"``, the
default) or no edge at all (``ties="none"``). Edge weights mix the normalised
distance and the normalised intensity difference, see :func:`edge_weight`.

:func:`enumerate_edges` is the slow, explicit reference. :func:`degree_profiles`
computes out-degree, weighted out-degree and weighted in-degree for every
``r = 1..R`` at once by accumulating running sums over distance rings.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .imagery import GrayImage

__all__ = [
    "TIE_RULES",
    "NeighborhoodOffsets",
    "EdgeRecord",
    "DegreeProfiles",
    "neighborhood",
    "edge_weight",
    "enumerate_edges",
    "edges_to_csv",
    "oracle_profiles",
    "degree_profiles",
]

TIE_RULES = ("bidirectional", "none")
MEASURES = ("k", "ks", "ke")


def _check_radius(R) -> int:
    if isinstance(R, bool) or int(R) != R:
        raise ValueError(f"radius must be an integer, got {R!r}")
    R = int(R)
    if R < 1:
        raise ValueError(f"radius must be >= 1, got {R}")
    return R


def _check_ties(ties):
    if ties not in TIE_RULES:
        raise ValueError(f"ties must be one of {TIE_RULES}, got {ties!r}")


@dataclass(frozen=True)
class NeighborhoodOffsets:
    """Integer offsets ``(dx, dy)`` with ``0 < dx**2 + dy**2 <= R**2``.

    Entries are sorted by squared distance (then ``dy``, ``dx``). ``rings`` maps
    each distinct squared distance to the slice of ``entries`` holding it.
    """

    max_radius: int
    dx: np.ndarray
    dy: np.ndarray
    sq_dist: np.ndarray
    rings: tuple

    @property
    def dist(self) -> np.ndarray:
        return np.sqrt(self.sq_dist.astype(np.float64))

    @property
    def entries(self) -> list:
        return [(int(a), int(b), math.sqrt(int(s))) for a, b, s in zip(self.dx, self.dy, self.sq_dist)]

    def __len__(self):
        return len(self.dx)

    def count_within(self, r: int) -> int:
        """Number of offsets with distance ``<= r``."""
        return int(np.searchsorted(self.sq_dist, r * r, side="right"))


def neighborhood(R: int) -> NeighborhoodOffsets:
    R = _check_radius(R)
    span = np.arange(-R, R + 1)
    dy, dx = (a.ravel() for a in np.meshgrid(span, span, indexing="ij"))
    sq = dx * dx + dy * dy
    keep = (sq > 0) & (sq <= R * R)
    dx, dy, sq = dx[keep], dy[keep], sq[keep]
    order = np.lexsort((dx, dy, sq))
    dx, dy, sq = dx[order], dy[order], sq[order]
    values, starts = np.unique(sq, return_index=True)
    bounds = list(starts) + [len(sq)]
    rings = tuple((int(v), slice(int(bounds[i]), int(bounds[i + 1]))) for i, v in enumerate(values))
    for arr in (dx, dy, sq):
        arr.setflags(write=False)
    return NeighborhoodOffsets(R, dx, dy, sq, rings)


def edge_weight(dist: float, delta_i: float, r: int, L: int) -> float:
    """Weight of an edge of length ``dist`` joining intensities ``delta_i`` apart.

    ``delta_i / L`` for ``r == 1``, otherwise the mean of ``(dist - 1) / (r - 1)``
    and ``delta_i / L``.
    """
    if r == 1:
        return delta_i / L
    return ((dist - 1.0) / (r - 1.0) + delta_i / L) / 2.0


class EdgeRecord(NamedTuple):
    src: int
    dst: int
    weight: float
    dist: float


def enumerate_edges(image: GrayImage, r: int, ties: str = "bidirectional") -> list:
    """List every edge of the network built with radius ``r``, pixel by pixel.

    Pixel indices are row-major. This is the O(N * |neighbourhood|) reference
    used to validate :func:`degree_profiles`; keep it to small images.
    """
    r = _check_radius(r)
    _check_ties(ties)
    w, h, L = image.width, image.height, image.max_level
    pix = image.pixels.tolist()
    nb = neighborhood(r)
    offsets = list(zip(nb.dx.tolist(), nb.dy.tolist(), nb.sq_dist.tolist()))
    edges = []
    for y in range(h):
        for x in range(w):
            a = pix[y][x]
            src = y * w + x
            for ox, oy, sq in offsets:
                xx, yy = x + ox, y + oy
                if not (0 <= xx < w and 0 <= yy < h):
                    continue
                b = pix[yy][xx]
                if a < b or (a == b and ties == "bidirectional"):
                    d = math.sqrt(sq)
                    edges.append(EdgeRecord(src, yy * w + xx, edge_weight(d, abs(a - b), r, L), d))
    return edges


def edges_to_csv(edges) -> str:
    """Serialise edges as ``src,dst,dist,weight`` CSV text (debug dump)."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["src", "dst", "dist", "weight"])
    for e in edges:
        out.writerow([e.src, e.dst, repr(e.dist), repr(e.weight)])
    return buf.getvalue()


@dataclass(frozen=True)
class DegreeProfiles:
    """Per-pixel degree evolution for radii ``1..max_radius``.

    ``k``, ``ks`` and ``ke`` have shape ``(max_radius, height, width)``; layer
    ``r - 1`` holds the values of the network built with radius ``r``.
    """

    width: int
    height: int
    max_radius: int
    k: np.ndarray
    ks: np.ndarray
    ke: np.ndarray

    def measure(self, name: str) -> np.ndarray:
        if name not in MEASURES:
            raise ValueError(f"unknown measure {name!r}; choose from {MEASURES}")
        return getattr(self, name)


def oracle_profiles(image: GrayImage, R: int, ties: str = "bidirectional") -> DegreeProfiles:
    """Aggregate :func:`enumerate_edges` per pixel for every ``r = 1..R``."""
    R = _check_radius(R)
    n = image.width * image.height
    k = np.zeros((R, n), dtype=np.int64)
    ks = np.zeros((R, n))
    ke = np.zeros((R, n))
    for r in range(1, R + 1):
        for e in enumerate_edges(image, r, ties):
            k[r - 1, e.src] += 1
            ks[r - 1, e.src] += e.weight
            ke[r - 1, e.dst] += e.weight
    shape = (R, image.height, image.width)
    return DegreeProfiles(image.width, image.height, R, k.reshape(shape), ks.reshape(shape), ke.reshape(shape))


def _shifted_views(pix: np.ndarray, ox: int, oy: int):
    """Views ``(here, there)`` pairing each in-bounds pixel with its neighbour at ``(ox, oy)``."""
    h, w = pix.shape
    ys = slice(max(0, -oy), min(h, h - oy))
    xs = slice(max(0, -ox), min(w, w - ox))
    ys2 = slice(ys.start + oy, ys.stop + oy)
    xs2 = slice(xs.start + ox, xs.stop + ox)
    return (ys, xs), (ys2, xs2)


def degree_profiles(image: GrayImage, R: int, ties: str = "bidirectional") -> DegreeProfiles:
    """Out-degree, weighted out-degree and weighted in-degree for ``r = 1..R``.

    Each offset contributes to pixel ``p`` an out-edge when the neighbour is at
    least as bright (strictly brighter with ``ties="none"``) and an in-edge when
    it is at most as bright. Running per-pixel sums of edge count, distance and
    intensity difference are snapshot at each radius, after which the
    ``r``-dependent weights follow from

        ks(r) = ((S_dist - k) / (r - 1) + S_delta / L) / 2,   r >= 2

    and ``ks(1) = S_delta / L``; ``ke`` likewise from the in-edge sums.
    """
    R = _check_radius(R)
    _check_ties(ties)
    pix = image.pixels
    h, w = pix.shape
    L = float(image.max_level)
    nb = neighborhood(R)

    cnt_out = np.zeros((h, w), dtype=np.int64)
    dist_out = np.zeros((h, w))
    delta_out = np.zeros((h, w), dtype=np.int64)
    cnt_in = np.zeros((h, w), dtype=np.int64)
    dist_in = np.zeros((h, w))
    delta_in = np.zeros((h, w), dtype=np.int64)

    k = np.zeros((R, h, w), dtype=np.int64)
    ks = np.zeros((R, h, w))
    ke = np.zeros((R, h, w))

    pos = 0
    for r in range(1, R + 1):
        stop = nb.count_within(r)
        for i in range(pos, stop):
            ox, oy = int(nb.dx[i]), int(nb.dy[i])
            (ys, xs), (ys2, xs2) = _shifted_views(pix, ox, oy)
            if ys.start >= ys.stop or xs.start >= xs.stop:
                continue
            a = pix[ys, xs]
            b = pix[ys2, xs2]
            diff = np.abs(a - b)
            d = math.sqrt(int(nb.sq_dist[i]))
            if ties == "bidirectional":
                out, inc = a <= b, a >= b
            else:
                out, inc = a < b, a > b
            cnt_out[ys, xs] += out
            dist_out[ys, xs] += d * out
            delta_out[ys, xs] += diff * out
            cnt_in[ys, xs] += inc
            dist_in[ys, xs] += d * inc
            delta_in[ys, xs] += diff * inc
        pos = stop

        k[r - 1] = cnt_out
        if r == 1:
            ks[0] = delta_out / L
            ke[0] = delta_in / L
        else:
            ks[r - 1] = ((dist_out - cnt_out) / (r - 1) + delta_out / L) / 2.0
            ke[r - 1] = ((dist_in - cnt_in) / (r - 1) + delta_in / L) / 2.0

    for arr in (k, ks, ke):
        arr.setflags(write=False)
    return DegreeProfiles(w, h, R, k, ks, ke)
