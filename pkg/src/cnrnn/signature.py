"""Texture signatures built from output weights of randomized networks.

For one ``(Q, R)`` pair, a network is trained on each of the three degree
measures (out-degree ``k``, weighted out-degree ``ks``, weighted in-degree
``ke``) with the pixel intensities as targets; the three weight vectors are
concatenated into an *upsilon* vector of length ``3 (Q + 1)``. A *theta*
vector concatenates upsilon vectors over several ``Q``; a *psi* vector
concatenates theta vectors for two maximum radii.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .imagery import GrayImage
from .netmodel import MEASURES, DegreeProfiles, degree_profiles
from .rnn import DEFAULT_LAMBDA, hidden_weights, output_weights, project, zscore_rows

__all__ = [
    "MODES",
    "PRESETS",
    "SignatureConfig",
    "Segment",
    "Signature",
    "build_training_set",
    "upsilon",
    "theta",
    "psi",
    "extract",
    "extract_many",
    "resolve_preset",
    "signature_csv",
]

MODES = ("upsilon", "theta", "psi")


@dataclass(frozen=True)
class SignatureConfig:
    """Composition recipe for a signature.

    ``radii`` has one entry for upsilon/theta and two distinct entries for psi.
    ``q_list`` is strictly increasing and has exactly one entry for upsilon.
    """

    mode: str
    radii: tuple
    q_list: tuple
    lam: float = DEFAULT_LAMBDA
    ties: str = "bidirectional"

    def __post_init__(self):
        mode = self.mode.lower()
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "radii", tuple(int(r) for r in self.radii))
        object.__setattr__(self, "q_list", tuple(int(q) for q in self.q_list))
        if mode not in MODES:
            raise ValueError(f"unknown signature mode {self.mode!r}; choose from {MODES}")
        if any(r < 1 for r in self.radii):
            raise ValueError("radii must be positive")
        want = 2 if mode == "psi" else 1
        if len(self.radii) != want:
            raise ValueError(f"{mode} needs exactly {want} radius value(s), got {len(self.radii)}")
        if mode == "psi" and self.radii[0] == self.radii[1]:
            raise ValueError("psi needs two different radii")
        if not self.q_list or any(q < 1 for q in self.q_list):
            raise ValueError("q_list must contain positive neuron counts")
        if any(b <= a for a, b in zip(self.q_list, self.q_list[1:])):
            raise ValueError("q_list must be strictly increasing")
        if mode == "upsilon" and len(self.q_list) != 1:
            raise ValueError("upsilon takes a single Q")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")

    @property
    def length(self) -> int:
        return len(self.radii) * sum(3 * (q + 1) for q in self.q_list)

    @property
    def name(self) -> str:
        radii = "-".join(str(r) for r in self.radii)
        qs = "-".join(str(q) for q in self.q_list)
        return f"{self.mode}-{radii}/{qs}"


PRESETS = {
    "theta-4/4-9-14": SignatureConfig("theta", (4,), (4, 9, 14)),
    "psi-4-6/4-9-14": SignatureConfig("psi", (4, 6), (4, 9, 14)),
    "psi-4-10/4-14-19": SignatureConfig("psi", (4, 10), (4, 14, 19)),
}


def resolve_preset(name: str) -> SignatureConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


class Segment(NamedTuple):
    measure: str
    Q: int
    R: int
    offset: int
    length: int


@dataclass(frozen=True, eq=False)
class Signature:
    config: SignatureConfig
    values: np.ndarray
    layout: tuple = field(default=())

    def __len__(self):
        return len(self.values)

    def segment(self, measure: str, Q: int, R: int) -> np.ndarray:
        for s in self.layout:
            if (s.measure, s.Q, s.R) == (measure, Q, R):
                return self.values[s.offset : s.offset + s.length]
        raise KeyError((measure, Q, R))


def build_training_set(profiles: DegreeProfiles, measure: str, R: int, image: GrayImage):
    """Return ``(X, D)``: ``X`` is ``R x N`` (radius ``r`` in row ``r - 1``), ``D`` the raw intensities.

    Columns follow row-major pixel order. ``X`` is not normalised here.
    """
    if profiles.max_radius < R:
        raise ValueError(f"profiles cover radii up to {profiles.max_radius}, need {R}")
    if R < 1:
        raise ValueError("R must be >= 1")
    if (profiles.width, profiles.height) != (image.width, image.height):
        raise ValueError(
            f"profiles are {profiles.width}x{profiles.height}, image is {image.width}x{image.height}"
        )
    X = profiles.measure(measure)[:R].reshape(R, -1).astype(np.float64)
    D = image.data.astype(np.float64)
    return X, D


def _upsilon_parts(image, profiles, Q, R, lam):
    W = hidden_weights(Q, R)
    parts = []
    for m in MEASURES:
        X, D = build_training_set(profiles, m, R, image)
        parts.append(output_weights(project(W, zscore_rows(X)), D, lam))
    return parts


def _assemble(config, image, profiles) -> Signature:
    values, layout, offset = [], [], 0
    for R in config.radii:
        for Q in config.q_list:
            for m, f in zip(MEASURES, _upsilon_parts(image, profiles, Q, R, config.lam)):
                layout.append(Segment(m, Q, R, offset, len(f)))
                values.append(f)
                offset += len(f)
    vec = np.concatenate(values)
    vec.setflags(write=False)
    return Signature(config, vec, tuple(layout))


def extract(image: GrayImage, config: SignatureConfig, profiles: DegreeProfiles | None = None) -> Signature:
    """Compute the signature described by ``config``.

    Degree profiles are computed once up to the largest radius and shared by
    all ``(Q, R)`` combinations; pass ``profiles`` to reuse them across calls.
    """
    if profiles is None or profiles.max_radius < max(config.radii):
        profiles = degree_profiles(image, max(config.radii), config.ties)
    return _assemble(config, image, profiles)


def upsilon(image: GrayImage, Q: int, R: int, lam: float = DEFAULT_LAMBDA, **kw) -> Signature:
    return extract(image, SignatureConfig("upsilon", (R,), (Q,), lam, **kw))


def theta(image: GrayImage, R: int, q_list: Sequence[int], lam: float = DEFAULT_LAMBDA, **kw) -> Signature:
    return extract(image, SignatureConfig("theta", (R,), tuple(q_list), lam, **kw))


def psi(image: GrayImage, radii, q_list: Sequence[int], lam: float = DEFAULT_LAMBDA, **kw) -> Signature:
    return extract(image, SignatureConfig("psi", tuple(radii), tuple(q_list), lam, **kw))


def extract_many(images, config: SignatureConfig, threads: int = 1) -> np.ndarray:
    """Signature matrix, one row per image, in input order.

    ``threads > 1`` only changes scheduling; every row is computed by the same
    single-image code path, so the output does not depend on it.
    """
    images = list(images)
    if threads is None or threads < 1:
        raise ValueError("threads must be >= 1")

    def one(img):
        return extract(img, config).values

    if threads == 1 or len(images) < 2:
        rows = [one(img) for img in images]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, images))
    if not rows:
        return np.zeros((0, config.length))
    return np.vstack(rows)


def signature_csv(rows, header: bool = True) -> str:
    """Render ``(source_path, tile_index, class_name, values)`` tuples as CSV text.

    Floats use Python's shortest round-trip ``repr``.
    """
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    rows = list(rows)
    if header and rows:
        n = len(rows[0][3])
        out.writerow(["source_path", "tile_index", "class_name"] + [f"v_{i}" for i in range(1, n + 1)])
    for path, idx, cname, values in rows:
        out.writerow([path, idx, cname] + [repr(float(v)) for v in values])
    return buf.getvalue()
