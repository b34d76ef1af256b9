"""Sample moments of a regression dataset and the covariance representation
of the regression coefficients.

All moment sums run along contiguous rows so numpy's pairwise summation is
used; the covariance denominator is always ``n - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from covreg.errors import DimensionMismatch, SingularMatrix, TooFewObservations
from covreg.linalg import PIVOT_RTOL, as_symmetric, pseudo_inverse_symmetric, solve_symmetric


@dataclass(frozen=True)
class Dataset:
    """A sample of ``n`` observations on a response and ``p`` predictors.

    ``x`` holds one observation per row. A one-dimensional ``x`` is read as a
    single predictor. Arrays are copied and made read-only.
    """

    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        x = np.array(self.x, dtype=float)
        if y.ndim != 1:
            raise DimensionMismatch(f"response must be a vector, got shape {y.shape}")
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DimensionMismatch(f"{y.shape[0]} responses against predictor matrix {x.shape}")
        if x.shape[1] < 1:
            raise DimensionMismatch("at least one predictor is required")
        if y.shape[0] < 2:
            raise TooFewObservations(f"need at least 2 observations, got {y.shape[0]}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise ValueError("dataset contains non-finite values")
        y.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def design(self) -> np.ndarray:
        """The matrix ``[1 | x]`` used by least squares."""
        return np.column_stack([np.ones(self.n), self.x])


@dataclass(frozen=True)
class CovarianceSummary:
    n: int
    ybar: float
    xbar: np.ndarray
    s_yx: np.ndarray
    s_xx: np.ndarray

    @property
    def p(self) -> int:
        return self.xbar.shape[0]


class CovarianceCoefficients(NamedTuple):
    b0: float
    b: np.ndarray
    used_pseudo_inverse: bool


def _mean_rows(a: np.ndarray) -> np.ndarray:
    """Row means of a C-contiguous array with one corrective pass."""
    n = a.shape[-1]
    m = np.sum(a, axis=-1) / n
    return m + np.sum(a - m[..., None], axis=-1) / n


def cross_products(at: np.ndarray, bt: np.ndarray) -> np.ndarray:
    """``at @ bt.T`` with each entry accumulated by pairwise summation.

    ``at`` is (k, n) and ``bt`` is (m, n); the inner dimension is contiguous.
    """
    at = np.ascontiguousarray(at)
    bt = np.ascontiguousarray(bt)
    return np.sum(at[:, None, :] * bt[None, :, :], axis=-1)


def summarize(d: Dataset) -> CovarianceSummary:
    n = d.n
    xt = np.ascontiguousarray(d.x.T)
    ybar = float(_mean_rows(d.y[None, :])[0])
    xbar = _mean_rows(xt)
    xc = xt - xbar[:, None]
    yc = d.y - ybar
    s_xx = cross_products(xc, xc) / (n - 1)
    s_yx = np.sum(xc * yc[None, :], axis=-1) / (n - 1)
    return CovarianceSummary(n=n, ybar=ybar, xbar=xbar, s_yx=s_yx, s_xx=s_xx)


def coefficients_from_covariances(c_xx, c_yx, mu_y, mu_x, rtol: float = PIVOT_RTOL) -> CovarianceCoefficients:
    """Regression coefficients from first and second moments.

    Solves ``c_xx b = c_yx`` and sets ``b0 = mu_y - mu_x . b``. When ``c_xx``
    is singular the spectral g-inverse is used instead and the result is
    flagged; the call never fails on singularity.
    """
    c_xx = as_symmetric(c_xx)
    c_yx = np.atleast_1d(np.asarray(c_yx, dtype=float))
    mu_x = np.atleast_1d(np.asarray(mu_x, dtype=float))
    p = c_xx.shape[0]
    if c_yx.shape != (p,) or mu_x.shape != (p,):
        raise DimensionMismatch(
            f"covariance matrix of order {p} with vectors of shape {c_yx.shape} and {mu_x.shape}"
        )
    try:
        b = solve_symmetric(c_xx, c_yx, rtol)
        used_pinv = False
    except SingularMatrix:
        b = pseudo_inverse_symmetric(c_xx) @ c_yx
        used_pinv = True
    b0 = float(mu_y) - float(mu_x @ b)
    return CovarianceCoefficients(b0=b0, b=b, used_pseudo_inverse=used_pinv)


def coefficients_p2(c11, c22, c12, cy1, cy2, rtol: float = PIVOT_RTOL) -> tuple[float, float]:
    """Closed-form slopes for two predictors (Cramer's rule on the 2x2 system)."""
    det = c11 * c22 - c12 * c12
    if not abs(det) > rtol * abs(c11 * c22):
        raise SingularMatrix("2x2 covariance matrix is singular")
    b1 = (c22 * cy1 - c12 * cy2) / det
    b2 = (c11 * cy2 - c12 * cy1) / det
    return b1, b2
