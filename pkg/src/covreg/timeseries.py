"""
AR(p) estimation and simulation.

Three estimators are provided:

* ``fit_ar_unbiased`` regresses ``Y_t`` on its ``p`` lags through the
  windowed sample covariances of the lagged design (denominator
  ``n - p - 1``) and recovers the intercept from the window means;
* ``fit_ar_ols`` runs least squares on the same design;
* ``fit_ar_yule_walker`` solves the Toeplitz system in the sample
  autocorrelations (``1/n`` autocovariances, overall-mean centering) and
  sets ``phi0 = ybar * (1 - sum(phi))``.

The first two agree to rounding on every admissible series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.linalg import solve_discrete_lyapunov, toeplitz
from scipy.signal import lfilter

from covreg.covariance import Dataset
from covreg.errors import DimensionMismatch, NonStationaryModel, TooFewObservations, ZeroVariance
from covreg.linalg import solve_symmetric
from covreg.regression import RegressionFit, fit_ols, fit_unbiased
from covreg.rng import standard_normal, stream

DEFAULT_BURN_IN = 500


@dataclass(frozen=True)
class ArModel:
    """``Y_t = phi0 + sum_i phi[i-1] Y_{t-i} + eps_t`` with ``sd(eps) = sigma``."""

    phi0: float
    phi: tuple[float, ...]
    sigma: float = 1.0

    def __post_init__(self):
        phi = tuple(float(v) for v in np.atleast_1d(self.phi))
        if len(phi) < 1:
            raise DimensionMismatch("an AR model needs at least one lag coefficient")
        if not self.sigma >= 0:
            raise ValueError("sigma must be non-negative")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "phi0", float(self.phi0))
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def p(self) -> int:
        return len(self.phi)

    def companion(self) -> np.ndarray:
        f = np.zeros((self.p, self.p))
        f[0, :] = self.phi
        f[1:, :-1] = np.eye(self.p - 1)
        return f

    @property
    def is_stationary(self) -> bool:
        """All roots of ``1 - phi_1 z - ... - phi_p z^p`` lie outside the unit circle."""
        return bool(np.max(np.abs(np.linalg.eigvals(self.companion()))) < 1.0)

    @property
    def mean(self) -> float:
        return self.phi0 / (1.0 - sum(self.phi))


@dataclass(frozen=True)
class ArFit:
    model: ArModel
    method: str
    n: int
    n_effective: int
    used_pseudo_inverse: bool = False
    regression: RegressionFit | None = None

    @property
    def p(self) -> int:
        return self.model.p


@dataclass(frozen=True)
class AutocovarianceSequence:
    gamma: np.ndarray
    rho: np.ndarray


def _series(series) -> np.ndarray:
    s = np.asarray(series, dtype=float)
    if s.ndim != 1:
        raise DimensionMismatch(f"series must be one-dimensional, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("series contains non-finite values")
    return s


def _check_order(p: int) -> None:
    if int(p) != p or p < 1:
        raise ValueError(f"order must be a positive integer, got {p!r}")


def lagged_design(series, p: int) -> Dataset:
    """Response ``(Y_{p+1}, ..., Y_n)`` against its lags; column ``i`` holds lag ``i``."""
    _check_order(p)
    s = _series(series)
    n = s.shape[0]
    if n < p + 2:
        raise TooFewObservations(f"series of length {n} is too short for a lagged design of order {p}")
    x = np.column_stack([s[p - i:n - i] for i in range(1, p + 1)])
    return Dataset(y=s[p:], x=x)


def window_means(series, p: int) -> np.ndarray:
    """Means ``Ybar_1 .. Ybar_{p+1}`` of the length ``n - p`` windows.

    ``Ybar_k`` averages ``Y_k, ..., Y_{k+n-p-1}``; ``Ybar_{p+1}`` is the
    response mean and ``Ybar_{p+1-i}`` the mean of lag column ``i``.
    Index 0 of the returned array is ``Ybar_1``.
    """
    s = _series(series)
    m = s.shape[0] - p
    return np.array([np.mean(s[k:k + m]) for k in range(p + 1)])


def _from_regression(fit: RegressionFit, method: str, n: int, p: int) -> ArFit:
    model = ArModel(phi0=fit.b0, phi=tuple(fit.b), sigma=math.sqrt(fit.sigma2_hat))
    return ArFit(model=model, method=method, n=n, n_effective=n - p,
                 used_pseudo_inverse=fit.used_pseudo_inverse, regression=fit)


def _check_fit_length(n: int, p: int) -> None:
    if n < p + 3:
        raise TooFewObservations(f"series of length {n} is too short to fit AR({p}); need at least {p + 3}")


def fit_ar_unbiased(series, p: int) -> ArFit:
    s = _series(series)
    _check_order(p)
    _check_fit_length(s.shape[0], p)
    fit = fit_unbiased(lagged_design(s, p))
    return _from_regression(fit, "unbiased", s.shape[0], p)


def fit_ar_ols(series, p: int) -> ArFit:
    s = _series(series)
    _check_order(p)
    _check_fit_length(s.shape[0], p)
    fit = fit_ols(lagged_design(s, p))
    return _from_regression(fit, "ols", s.shape[0], p)


def autocovariances(series, max_lag: int) -> AutocovarianceSequence:
    """Sample autocovariances with ``1/n`` scaling about the overall mean."""
    s = _series(series)
    n = s.shape[0]
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    c = s - np.mean(s)
    gamma = np.array([np.sum(c[:n - k] * c[k:]) / n for k in range(max_lag + 1)])
    if not gamma[0] > 0:
        raise ZeroVariance("series has zero variance")
    return AutocovarianceSequence(gamma=gamma, rho=gamma / gamma[0])


def yule_walker_solve(rho, p: int) -> np.ndarray:
    """Solve ``R phi = (rho_1..rho_p)`` with ``R[i, j] = rho_|i-j|``."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape[0] < p + 1:
        raise DimensionMismatch(f"need autocorrelations up to lag {p}, got {rho.shape[0] - 1}")
    return solve_symmetric(toeplitz(rho[:p]), rho[1:p + 1])


def fit_ar_yule_walker(series, p: int) -> ArFit:
    s = _series(series)
    _check_order(p)
    n = s.shape[0]
    if n < p + 2:
        raise TooFewObservations(f"series of length {n} is too short for Yule-Walker of order {p}")
    acov = autocovariances(s, p)
    phi = yule_walker_solve(acov.rho, p)
    phi0 = float(np.mean(s)) * (1.0 - float(np.sum(phi)))
    innovation_var = max(float(acov.gamma[0] * (1.0 - phi @ acov.rho[1:p + 1])), 0.0)
    model = ArModel(phi0=phi0, phi=tuple(phi), sigma=math.sqrt(innovation_var))
    return ArFit(model=model, method="yule_walker", n=n, n_effective=n)


def theoretical_autocovariances(model: ArModel, max_lag: int) -> AutocovarianceSequence:
    """Autocovariances of a stationary AR model.

    The first ``p`` come from the stationary covariance of the companion
    state vector; higher lags follow the AR recursion.
    """
    if not model.is_stationary:
        raise NonStationaryModel("autocovariances are undefined for a non-stationary model")
    p = model.p
    q = np.zeros((p, p))
    q[0, 0] = model.sigma ** 2
    state_cov = solve_discrete_lyapunov(model.companion(), q)
    gamma = np.zeros(max(max_lag, p - 1) + 1)
    gamma[:p] = state_cov[0, :p]
    phi = np.array(model.phi)
    for k in range(p, max_lag + 1):
        gamma[k] = phi @ gamma[k - p:k][::-1]
    gamma = gamma[:max_lag + 1]
    if not gamma[0] > 0:
        raise ZeroVariance("model has zero innovation variance")
    return AutocovarianceSequence(gamma=gamma, rho=gamma / gamma[0])


def simulate_ar(model: ArModel, n: int, burn_in: int = DEFAULT_BURN_IN, seed=0,
                allow_nonstationary: bool = False) -> np.ndarray:
    """Simulate ``n`` values of ``model`` after discarding ``burn_in`` steps.

    A stationary model starts from its mean; otherwise from zero, which
    requires ``allow_nonstationary=True``. Innovations are Gaussian from
    :func:`covreg.rng.standard_normal` on the stream for ``seed``.
    """
    if n < 1 or burn_in < 0:
        raise ValueError("need n >= 1 and burn_in >= 0")
    stationary = model.is_stationary
    if not stationary and not allow_nonstationary:
        raise NonStationaryModel(f"AR coefficients {model.phi} do not define a stationary process")
    eps = model.sigma * standard_normal(stream(seed), n + burn_in)
    a = np.concatenate([[1.0], -np.array(model.phi)])
    if stationary:
        y = model.mean + lfilter([1.0], a, eps)
    else:
        y = lfilter([1.0], a, eps + model.phi0)
    return y[burn_in:]


def load_lake_huron() -> np.ndarray:
    """Annual Lake Huron levels 1875-1972, in feet above 570 ft (98 values)."""
    text = resources.files("covreg.data").joinpath("lake_huron.txt").read_text()
    return np.array([float(v) for v in text.split()])
