"""Gaussian linear discriminant analysis and leave-one-out evaluation."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import DatasetError, SingularMatrixError

__all__ = ["DEFAULT_SHRINKAGE", "LdaModel", "EvalReport", "lda_fit", "lda_predict", "loocv"]

DEFAULT_SHRINKAGE = 1e-6
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class LdaModel:
    """Pooled-covariance LDA.

    ``classes`` holds the sorted original labels; ``means`` row ``c`` is the
    mean of class ``classes[c]``. The score of class ``c`` at ``x`` is
    ``x . coef[c] + intercept[c]`` with ``coef[c] = S^-1 mu_c`` and
    ``intercept[c] = -mu_c . coef[c] / 2 + ln prior_c``.
    """

    classes: np.ndarray
    means: np.ndarray
    priors: np.ndarray
    cov_factor: tuple
    shrinkage: float
    coef: np.ndarray
    intercept: np.ndarray

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X @ self.coef.T + self.intercept

    def predict(self, X) -> np.ndarray:
        """Highest-scoring class; scores within ``TIE_RTOL`` of the best count
        as tied and resolve to the smallest class id."""
        scores = self.decision_function(X)
        best = scores.max(axis=1, keepdims=True)
        tol = TIE_RTOL * np.maximum(1.0, np.abs(scores).max(axis=1, keepdims=True))
        # argmax returns the first True, i.e. the smallest tied class
        return self.classes[np.argmax(scores >= best - tol, axis=1)]


def _check_xy(features, labels):
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array (samples x features)")
    if y.shape != (X.shape[0],):
        raise ValueError(f"{X.shape[0]} samples but {y.size} labels")
    if X.shape[1] < 1:
        raise ValueError("need at least one feature")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    return X, y


def lda_fit(features, labels, shrinkage: float = DEFAULT_SHRINKAGE) -> LdaModel:
    """Fit LDA with pooled within-class covariance.

    The covariance is ``sum_c sum_{x in c} (x - mu_c)(x - mu_c)^T / (N - C)``,
    then shrunk as ``S + shrinkage * tr(S) / n * I``. Every class needs at
    least two samples.
    """
    return _fit(features, labels, shrinkage, min_count=2)


def _fit(features, labels, shrinkage, min_count):
    X, y = _check_xy(features, labels)
    if shrinkage < 0:
        raise ValueError("shrinkage must be >= 0")
    classes, inv, counts = np.unique(y, return_inverse=True, return_counts=True)
    if len(classes) < 2:
        raise DatasetError("LDA needs at least two classes")
    if np.any(counts < min_count):
        bad = classes[counts < min_count]
        raise DatasetError(f"classes with fewer than {min_count} samples: {bad.tolist()}")
    N, n = X.shape
    C = len(classes)
    if N <= C:
        raise DatasetError("need more samples than classes to estimate a pooled covariance")
    means = np.zeros((C, n))
    np.add.at(means, inv, X)
    means /= counts[:, None]
    centered = X - means[inv]
    S = centered.T @ centered / (N - C)
    if shrinkage > 0:
        S[np.diag_indices(n)] += shrinkage * np.trace(S) / n
    try:
        factor = la.cho_factor(S, lower=True)
    except la.LinAlgError:
        raise SingularMatrixError(
            "pooled covariance is singular; fit with shrinkage > 0",
            condition=np.linalg.cond(S),
        ) from None
    if shrinkage == 0 and np.linalg.cond(S) > 1.0 / np.finfo(float).eps:
        raise SingularMatrixError(
            "pooled covariance is singular; fit with shrinkage > 0", condition=np.linalg.cond(S)
        )
    coef = la.cho_solve(factor, means.T).T
    priors = counts / N
    intercept = -0.5 * np.einsum("ij,ij->i", means, coef) + np.log(priors)
    return LdaModel(classes, means, priors, factor, float(shrinkage), coef, intercept)


def lda_predict(model: LdaModel, x):
    """Class of a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a single feature vector")
    return model.predict(x[None, :])[0]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    confusion: np.ndarray
    per_class_accuracy: np.ndarray
    n_samples: int
    class_names: tuple = ()
    predictions: np.ndarray | None = None

    def to_table(self) -> str:
        names = self.class_names or tuple(str(i) for i in range(len(self.confusion)))
        width = max(len("class"), *(len(n) for n in names))
        lines = [f"accuracy: {self.accuracy:.2f}% ({int(np.trace(self.confusion))}/{self.n_samples})", ""]
        lines.append(f"{'class':<{width}}  {'n':>5}  {'acc%':>7}")
        for name, row, acc in zip(names, self.confusion, self.per_class_accuracy):
            lines.append(f"{name:<{width}}  {int(row.sum()):>5}  {acc:>7.2f}")
        return "\n".join(lines) + "\n"

    def to_keyvalue(self) -> str:
        lines = [
            f"accuracy={self.accuracy:.2f}",
            f"n_samples={self.n_samples}",
            f"n_correct={int(np.trace(self.confusion))}",
            f"n_classes={len(self.confusion)}",
        ]
        names = self.class_names or tuple(str(i) for i in range(len(self.confusion)))
        lines += [f"class_accuracy.{n}={a:.2f}" for n, a in zip(names, self.per_class_accuracy)]
        return "\n".join(lines) + "\n"

    def confusion_csv(self) -> str:
        names = self.class_names or tuple(str(i) for i in range(len(self.confusion)))
        buf = io.StringIO()
        buf.write("true\\predicted," + ",".join(names) + "\n")
        for n, row in zip(names, self.confusion):
            buf.write(n + "," + ",".join(str(int(v)) for v in row) + "\n")
        return buf.getvalue()


def loocv(features, labels, shrinkage: float = DEFAULT_SHRINKAGE, class_names=None) -> EvalReport:
    """Leave-one-out accuracy of LDA: ``N`` fits on ``N - 1`` samples each.

    Labels must be dense class ids ``0..C-1``.
    """
    X, y = _check_xy(features, labels)
    y = y.astype(np.int64)
    C = int(y.max()) + 1 if y.size else 0
    counts = np.bincount(y, minlength=C)
    if C < 2 or np.any(counts == 0):
        raise DatasetError("labels must be dense class ids covering at least two classes")
    for c in np.flatnonzero(counts < 2):
        name = class_names[c] if class_names is not None else str(c)
        raise DatasetError(f"class {name!r} has a single sample; leave-one-out needs at least two")

    N = len(y)
    pred = np.empty(N, dtype=np.int64)
    keep = np.ones(N, dtype=bool)
    for i in range(N):
        keep[i] = False
        # a held-out sample may leave its class with one training sample
        model = _fit(X[keep], y[keep], shrinkage, min_count=1)
        pred[i] = lda_predict(model, X[i])
        keep[i] = True

    confusion = np.zeros((C, C), dtype=np.int64)
    np.add.at(confusion, (y, pred), 1)
    per_class = 100.0 * np.diag(confusion) / counts
    accuracy = 100.0 * np.trace(confusion) / N
    names = tuple(class_names) if class_names is not None else ()
    return EvalReport(accuracy, confusion, per_class, N, names, pred)
