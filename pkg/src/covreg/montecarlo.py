"""
Monte Carlo bias studies for the covariance-based estimators.

A :class:`SimulationScenario` describes a generative model; replication ``i``
draws its data from the stream seeded by ``(seed, i)`` and records the
fitted coefficients, ``sigma2_hat`` and ``R0^2``. Because each replication
owns its stream and results are collected by index, the report is
bit-identical for any number of workers.

Scenario kinds
--------------
linear
    ``Y = b0 + X b + sigma * eps`` with independent standard normal
    predictors and errors (additive, predictor-independent error).
class_c
    ``Y = b0 + b1 X1 + b2 X2 + sigma * |X1 - X2| * Z``: the conditional mean
    is linear but the conditional variance depends on the predictors. Here
    ``sigma`` plays the role of the scale coefficient on ``|X1 - X2| Z``.
ar
    AR(p) with intercept ``b0``, lag coefficients ``b`` and innovation sd
    ``sigma``, fitted by regression on its own lags.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from covreg.covariance import Dataset
from covreg.errors import InvalidScenario
from covreg.regression import fit_unbiased
from covreg.rng import standard_normal, stream
from covreg.timeseries import DEFAULT_BURN_IN, ArModel, fit_ar_unbiased, simulate_ar

KINDS = ("linear", "class_c", "ar")


@dataclass(frozen=True)
class SimulationScenario:
    kind: str
    n: int
    b0: float = 0.0
    b: tuple[float, ...] = (1.0,)
    sigma: float = 1.0
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(v) for v in np.atleast_1d(self.b)))
        if self.kind not in KINDS:
            raise InvalidScenario(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        p = len(self.b)
        if p < 1:
            raise InvalidScenario("scenario needs at least one coefficient")
        if self.kind == "class_c" and p != 2:
            raise InvalidScenario(f"class_c scenario has exactly 2 predictors, got {p}")
        if self.sigma < 0:
            raise InvalidScenario("sigma must be non-negative")
        min_n = p + 3 if self.kind == "ar" else p + 2
        if self.n < min_n:
            raise InvalidScenario(f"n={self.n} is too small for {p} coefficients (need {min_n})")
        if self.kind == "ar" and not ArModel(self.b0, self.b, self.sigma).is_stationary:
            raise InvalidScenario(f"AR coefficients {self.b} are not stationary")

    @property
    def p(self) -> int:
        return len(self.b)

    @property
    def truth(self) -> np.ndarray:
        return np.array((self.b0,) + self.b)

    @property
    def conditional_variance(self) -> float:
        """``E Var(Y | X)``; for ``class_c`` this is an average over the design."""
        if self.kind == "class_c":
            # E (X1 - X2)^2 = 2 for independent standard normals
            return 2.0 * self.sigma ** 2
        return self.sigma ** 2

    @property
    def constant_variance(self) -> bool:
        return self.kind != "class_c" or self.sigma == 0.0

    def coefficient_names(self) -> list[str]:
        prefix = "phi" if self.kind == "ar" else "b"
        return [f"{prefix}{i}" for i in range(self.p + 1)]

    def draw(self, gen: np.random.Generator) -> Dataset:
        n, p = self.n, self.p
        b = np.array(self.b)
        x = standard_normal(gen, (n, p))
        if self.kind == "linear":
            y = self.b0 + x @ b + self.sigma * standard_normal(gen, n)
        else:
            z = standard_normal(gen, n)
            y = self.b0 + x @ b + self.sigma * np.abs(x[:, 0] - x[:, 1]) * z
        return Dataset(y=y, x=x)


@dataclass(frozen=True)
class EstimateBias:
    name: str
    truth: float
    mean: float
    se: float
    z: float


@dataclass(frozen=True)
class BiasReport:
    scenario: SimulationScenario
    reps: int
    seed: int
    coefficients: list[EstimateBias]
    sigma2: EstimateBias
    r0_squared_mean: float
    constant_variance: bool
    samples: np.ndarray = field(repr=False, compare=False)

    def max_coefficient_z(self) -> float:
        return max(c.z for c in self.coefficients)

    def to_dict(self) -> dict:
        return {
            "scenario": asdict(self.scenario),
            "reps": self.reps,
            "seed": self.seed,
            "coefficients": [asdict(c) for c in self.coefficients],
            "sigma2_hat": asdict(self.sigma2),
            "constant_variance": self.constant_variance,
            "r0_squared_mean": self.r0_squared_mean,
        }


def replicate(scenario: SimulationScenario, seed: int, index: int) -> np.ndarray:
    """One replication: ``(b0, b1..bp, sigma2_hat, r0_squared)``."""
    gen_seed = (seed, index)
    if scenario.kind == "ar":
        model = ArModel(scenario.b0, scenario.b, scenario.sigma)
        series = simulate_ar(model, scenario.n, scenario.burn_in, seed=gen_seed)
        fit = fit_ar_unbiased(series, scenario.p).regression
    else:
        fit = fit_unbiased(scenario.draw(stream(gen_seed)))
    return np.concatenate([[fit.b0], fit.b, [fit.sigma2_hat, fit.r0_squared]])


def _run_block(args) -> np.ndarray:
    scenario, seed, start, stop = args
    return np.array([replicate(scenario, seed, i) for i in range(start, stop)])


def _summarize_column(name: str, values: np.ndarray, truth: float) -> EstimateBias:
    reps = values.shape[0]
    mean = math.fsum(values) / reps
    se = float(np.std(values, ddof=1)) / math.sqrt(reps)
    gap = abs(mean - float(truth))
    if se > 0:
        z = gap / se
    else:
        z = 0.0 if gap <= 1e-12 * max(1.0, abs(truth)) else math.inf
    return EstimateBias(name=name, truth=float(truth), mean=mean, se=se, z=z)


def monte_carlo_bias(scenario: SimulationScenario, reps: int, seed: int, workers: int = 1,
                     block: int = 500) -> BiasReport:
    """Estimate the bias of the covariance-based fit under ``scenario``.

    For each coefficient the report holds the Monte Carlo mean, the truth,
    the standard error of the mean and ``z = |mean - truth| / se``; the same
    is reported for ``sigma2_hat`` against ``scenario.conditional_variance``.
    """
    if reps < 100:
        raise ValueError("reps must be at least 100")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    tasks = [(scenario, seed, s, min(s + block, reps)) for s in range(0, reps, block)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, tasks))
    else:
        parts = [_run_block(t) for t in tasks]
    samples = np.vstack(parts)

    names = scenario.coefficient_names()
    truth = scenario.truth
    coefs = [_summarize_column(names[j], samples[:, j], truth[j]) for j in range(scenario.p + 1)]
    sigma2 = _summarize_column("sigma2_hat", samples[:, scenario.p + 1], scenario.conditional_variance)
    r0 = math.fsum(samples[:, scenario.p + 2]) / reps
    return BiasReport(
        scenario=scenario, reps=reps, seed=seed, coefficients=coefs, sigma2=sigma2,
        r0_squared_mean=r0, constant_variance=scenario.constant_variance, samples=samples,
    )
