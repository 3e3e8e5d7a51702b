"""Randomized single-hidden-layer network with deterministic hidden weights.

The hidden weights come from a fixed linear congruential sequence, so a given
``(Q, p)`` always yields the same layer and the trained output weights are a
pure function of the training data. Output weights are the ridge solution

    f (Z Z^T + lambda I) = D Z^T

obtained through a Cholesky factorisation of the symmetric system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.special import expit

from .errors import NumericalError, SingularMatrixError

__all__ = [
    "DEFAULT_LAMBDA",
    "HiddenLayer",
    "lcg_sequence",
    "lcg_values",
    "hidden_weights",
    "zscore_rows",
    "project",
    "output_weights",
    "train",
]

DEFAULT_LAMBDA = 1e-3


def lcg_values(E: int) -> list:
    """Exact integer LCG sequence of length ``E``.

    ``V(1) = E + 1`` and ``V(n+1) = (a V(n) + b) mod c`` with ``a = E + 2``,
    ``b = E + 3``, ``c = E**2``. Python integers never overflow.
    """
    E = int(E)
    if E < 1:
        raise ValueError("sequence length must be >= 1")
    a, b, c = E + 2, E + 3, E * E
    v = E + 1
    out = [v]
    for _ in range(E - 1):
        v = (a * v + b) % c
        out.append(v)
    return out


def lcg_sequence(E: int) -> np.ndarray:
    """:func:`lcg_values` as a float64 array.

    Every value is below ``E**2`` (except the seed ``E + 1``), so the
    conversion is exact while ``E**2 < 2**53``.
    """
    values = lcg_values(E)
    if E * E >= 2**53:
        raise OverflowError(f"E={E} too large for exact float64 representation")
    return np.array(values, dtype=np.float64)


@dataclass(frozen=True)
class HiddenLayer:
    """Hidden weights of shape ``(neuron_count, input_arity + 1)``; last column multiplies the bias."""

    weights: np.ndarray

    @property
    def neuron_count(self) -> int:
        return self.weights.shape[0]

    @property
    def input_arity(self) -> int:
        return self.weights.shape[1] - 1


def hidden_weights(Q: int, p: int) -> HiddenLayer:
    """LCG sequence of length ``Q (p + 1)`` reshaped row-major to ``Q x (p + 1)``,
    z-scored over all entries jointly (population std)."""
    if Q < 1 or p < 1:
        raise ValueError(f"need Q >= 1 and p >= 1, got Q={Q}, p={p}")
    v = lcg_sequence(Q * (p + 1)).reshape(Q, p + 1)
    sd = v.std()
    if sd == 0:
        raise NumericalError(f"LCG sequence for Q={Q}, p={p} is constant; cannot normalize")
    w = (v - v.mean()) / sd
    w.setflags(write=False)
    return HiddenLayer(w)


def zscore_rows(X) -> np.ndarray:
    """Standardise each row to zero mean and unit population std.

    Constant rows become all zeros.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    out = np.zeros_like(X)
    varying = np.ptp(X, axis=1) > 0
    if np.any(varying):
        rows = X[varying]
        mu = rows.mean(axis=1, keepdims=True)
        sd = rows.std(axis=1, keepdims=True)
        out[varying] = (rows - mu) / sd
    return out


def project(W: HiddenLayer, X) -> np.ndarray:
    """Hidden-layer output with bias rows, shape ``(Q + 1, N)``.

    A row of ones is appended to ``X`` before multiplying by the weights, the
    logistic sigmoid is applied, and another row of ones is appended to the
    result.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != W.input_arity:
        raise ValueError(
            f"input has {X.shape[0] if X.ndim == 2 else X.shape} attributes, "
            f"hidden layer expects {W.input_arity}"
        )
    ones = np.ones((1, X.shape[1]))
    Z = expit(W.weights @ np.vstack([X, ones]))
    return np.vstack([Z, ones])


def output_weights(Z, D, lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    """Solve ``f (Z Z^T + lam I) = D Z^T`` for the length ``Z.shape[0]`` vector ``f``."""
    Z = np.asarray(Z, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64).reshape(-1)
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if Z.ndim != 2 or Z.shape[1] != D.shape[0]:
        raise ValueError(f"Z has shape {Z.shape} but D has length {D.shape[0]}")
    A = Z @ Z.T
    A[np.diag_indices_from(A)] += lam
    rhs = Z @ D
    try:
        factor = la.cho_factor(A, lower=True, check_finite=True)
    except la.LinAlgError:
        raise SingularMatrixError(
            "Z Z^T + lambda I is not positive definite; use lambda > 0",
            condition=np.linalg.cond(A),
        ) from None
    f = la.cho_solve(factor, rhs)
    if lam == 0:
        # Cholesky can succeed on numerically singular Gram matrices
        rcond = 1.0 / np.linalg.cond(A)
        if not np.isfinite(rcond) or rcond < np.finfo(float).eps:
            raise SingularMatrixError(
                "Z Z^T is singular; use lambda > 0", condition=np.linalg.cond(A)
            )
    return f


def train(X, D, Q: int, lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    """Full pipeline for one measure: z-score ``X``, project, solve; returns ``Q + 1`` weights."""
    X = zscore_rows(X)
    return output_weights(project(hidden_weights(Q, X.shape[0]), X), D, lam)
