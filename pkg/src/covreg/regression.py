"""
Linear regression through sample covariances, and ordinary least squares.

``fit_unbiased`` solves ``S_xx b = S_yx`` and recovers the intercept from the
means; ``fit_ols`` solves the normal equations of the augmented design
``[1 | X]``. On any dataset whose predictor covariance matrix is
nonsingular the two coincide up to rounding, and both produce the same
residual analysis, dispersion estimate and ANOVA decomposition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from covreg.covariance import (
    CovarianceSummary,
    Dataset,
    coefficients_from_covariances,
    cross_products,
    summarize,
)
from covreg.errors import DimensionMismatch, TooFewObservations
from covreg.linalg import inverse_symmetric, invert_partitioned, pseudo_inverse_symmetric, solve_symmetric

ANNIHILATOR_MAX_N = 2000


@dataclass(frozen=True)
class RegressionFit:
    method: str
    n: int
    p: int
    b0: float
    b: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    sigma2_hat: float
    dispersion: np.ndarray
    ss_t: float
    ss_r: float
    ss_e: float
    r0_squared: float
    used_pseudo_inverse: bool = False

    @property
    def coefficients(self) -> np.ndarray:
        """``(b0, b1, ..., bp)`` as one vector."""
        return np.concatenate([[self.b0], self.b])

    @property
    def standard_errors(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.dispersion), 0.0, None))


class ResidualAnalysis(NamedTuple):
    residuals: np.ndarray
    ss_e: float
    sigma2_hat: float


class Anova(NamedTuple):
    ss_t: float
    ss_r: float
    ss_e: float
    r0_squared: float


@dataclass(frozen=True)
class Prediction:
    x0: np.ndarray
    y_hat: float
    var_hat: float


@dataclass(frozen=True)
class AnnihilatorDiagnostics:
    """Deviations of ``M = I - X1 (X1^t X1)^{-1} X1^t`` from its textbook properties.

    The matrix-valued checks are ``None`` when ``n`` exceeds the size at which
    ``M`` is materialized.
    """

    n: int
    p: int
    symmetry: float | None
    idempotence: float | None
    trace_error: float | None
    annihilates_design: float | None
    orthogonality: float
    mean_gap: float
    design_scale: float = field(repr=False)
    response_scale: float = field(repr=False)

    def ok(self, tol: float = 1e-8) -> bool:
        checks = [
            (self.symmetry, 1.0),
            (self.idempotence, 1.0),
            (self.trace_error, 1.0),
            (self.annihilates_design, self.design_scale),
            (self.orthogonality, self.response_scale),
            (self.mean_gap, self.response_scale),
        ]
        return all(v is None or v <= tol * max(s, 1.0) for v, s in checks)


def _check_dof(d: Dataset) -> None:
    if d.n < d.p + 2:
        raise TooFewObservations(
            f"{d.n} observations cannot fit {d.p} predictors with an intercept and a residual degree of freedom"
        )


def _cross_design(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """``X1^t X1`` and ``X1^t y`` with pairwise accumulation."""
    x1t = np.ascontiguousarray(d.design().T)
    xtx = cross_products(x1t, x1t)
    xty = np.sum(x1t * d.y[None, :], axis=-1)
    return xtx, xty


def residual_analysis(d: Dataset, b0: float, b) -> ResidualAnalysis:
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if b.shape != (d.p,):
        raise DimensionMismatch(f"{b.shape[0]} slopes for {d.p} predictors")
    if d.n <= d.p + 1:
        raise TooFewObservations(f"residual variance needs n > p + 1, got n={d.n}, p={d.p}")
    e = d.y - (b0 + d.x @ b)
    ss_e = float(np.sum(e * e))
    return ResidualAnalysis(residuals=e, ss_e=ss_e, sigma2_hat=ss_e / (d.n - d.p - 1))


def dispersion_estimate(d: Dataset, sigma2_hat: float, summary: CovarianceSummary | None = None) -> np.ndarray:
    """``sigma2_hat * (X1^t X1)^{-1}`` built from the partitioned inverse."""
    if sigma2_hat < 0:
        raise ValueError("sigma2_hat must be non-negative")
    s = summary if summary is not None else summarize(d)
    sxx_inv = inverse_symmetric(s.s_xx)
    return sigma2_hat * invert_partitioned(s.n, s.xbar, sxx_inv)


def _sums_of_squares(y: np.ndarray, fitted: np.ndarray, residuals: np.ndarray) -> Anova:
    ybar = float(np.mean(y))
    dev = y - ybar
    ss_t = float(np.sum(dev * dev))
    reg = fitted - ybar
    ss_r = float(np.sum(reg * reg))
    ss_e = float(np.sum(residuals * residuals))
    r0 = ss_r / ss_t if ss_t > 0 else 0.0
    return Anova(ss_t=ss_t, ss_r=ss_r, ss_e=ss_e, r0_squared=r0)


def anova(d: Dataset, fit: RegressionFit) -> Anova:
    """Total, regression and residual sums of squares and ``R0^2``.

    ``R0^2`` is reported as 0 for a constant response.
    """
    return _sums_of_squares(d.y, fit.fitted, fit.residuals)


def _assemble(d: Dataset, method: str, b0: float, b: np.ndarray, used_pinv: bool,
              summary: CovarianceSummary | None) -> RegressionFit:
    res = residual_analysis(d, b0, b)
    fitted = d.y - res.residuals
    if used_pinv:
        xtx, _ = _cross_design(d)
        dispersion = res.sigma2_hat * pseudo_inverse_symmetric(xtx)
    else:
        dispersion = dispersion_estimate(d, res.sigma2_hat, summary)
    a = _sums_of_squares(d.y, fitted, res.residuals)
    return RegressionFit(
        method=method, n=d.n, p=d.p, b0=b0, b=b, fitted=fitted, residuals=res.residuals,
        sigma2_hat=res.sigma2_hat, dispersion=dispersion,
        ss_t=a.ss_t, ss_r=a.ss_r, ss_e=a.ss_e, r0_squared=a.r0_squared, used_pseudo_inverse=used_pinv,
    )


def fit_unbiased(d: Dataset) -> RegressionFit:
    """Covariance-based fit: ``b = S_xx^{-1} S_yx``, ``b0 = ybar - xbar . b``.

    A singular ``S_xx`` is handled with the spectral g-inverse and reported
    through ``used_pseudo_inverse``.
    """
    _check_dof(d)
    s = summarize(d)
    coef = coefficients_from_covariances(s.s_xx, s.s_yx, s.ybar, s.xbar)
    return _assemble(d, "unbiased", coef.b0, coef.b, coef.used_pseudo_inverse, s)


def fit_ols(d: Dataset) -> RegressionFit:
    """Least squares on the augmented design, ``(X1^t X1)^{-1} X1^t y``."""
    _check_dof(d)
    xtx, xty = _cross_design(d)
    beta = solve_symmetric(xtx, xty)
    return _assemble(d, "ols", float(beta[0]), beta[1:], False, None)


def annihilator_checks(d: Dataset, max_n: int = ANNIHILATOR_MAX_N) -> AnnihilatorDiagnostics:
    """Numerically verify the residual-maker identities on ``d``.

    Raises SingularMatrix if ``X1^t X1`` is singular. ``M`` itself is formed
    only when ``n <= max_n``.
    """
    x1 = d.design()
    xtx, xty = _cross_design(d)
    xtx_inv = inverse_symmetric(xtx)
    beta = xtx_inv @ xty
    fitted = x1 @ beta
    e = d.y - fitted
    design_scale = float(np.max(np.abs(x1)))
    response_scale = float(np.max(np.abs(d.y)))
    orth = float(np.max(np.abs(x1.T @ e)))
    mean_gap = abs(float(np.mean(d.y)) - float(np.mean(fitted)))
    sym = idem = tr = ann = None
    if d.n <= max_n:
        m = np.eye(d.n) - x1 @ xtx_inv @ x1.T
        sym = float(np.max(np.abs(m - m.T)))
        idem = float(np.max(np.abs(m @ m - m)))
        tr = abs(float(np.trace(m)) - (d.n - d.p - 1))
        ann = float(np.max(np.abs(m @ x1)))
    return AnnihilatorDiagnostics(
        n=d.n, p=d.p, symmetry=sym, idempotence=idem, trace_error=tr, annihilates_design=ann,
        orthogonality=orth, mean_gap=mean_gap, design_scale=design_scale, response_scale=response_scale,
    )


def predict(fit: RegressionFit, summary: CovarianceSummary, x0, include_intercept: bool = True) -> Prediction:
    """Point prediction at ``x0`` with its estimated variance.

    ``var_hat = sigma2_hat * x0 S_xx^{-1} x0^t / (n - 1)``. With
    ``include_intercept=False`` the point prediction is ``x0 . b`` alone.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (fit.p,) or summary.p != fit.p:
        raise DimensionMismatch(f"prediction point of shape {x0.shape} for a {fit.p}-predictor fit")
    y_hat = float(x0 @ fit.b) + (fit.b0 if include_intercept else 0.0)
    q = float(x0 @ solve_symmetric(summary.s_xx, x0))
    var_hat = max(fit.sigma2_hat * q / (summary.n - 1), 0.0)
    return Prediction(x0=x0, y_hat=y_hat, var_hat=var_hat)

