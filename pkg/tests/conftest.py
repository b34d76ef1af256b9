import numpy as np
import pytest

from covreg.covariance import Dataset

_ACCEPTANCE = {}


def random_dataset(rng: np.random.Generator, p: int | None = None, n: int | None = None,
                   noise: float = 0.1) -> Dataset:
    """Random regression data with mixed predictor scales and offsets.

    Column scales span 10^-1.5 .. 10^1.5, offsets up to 3 scale units, and the
    true slopes are O(1) once the column is standardized.
    """
    if p is None:
        p = int(rng.integers(1, 13))
    if n is None:
        n = int(rng.integers(p + 2, 501))
    scale = 10.0 ** rng.uniform(-1.5, 1.5, p)
    offset = scale * rng.uniform(-3.0, 3.0, p)
    x = offset + scale * rng.standard_normal((n, p))
    beta = rng.choice([-1.0, 1.0], p) * rng.uniform(0.5, 2.0, p) / scale
    b0 = rng.uniform(-5.0, 5.0)
    y = b0 + x @ beta + noise * rng.standard_normal(n)
    return Dataset(y=y, x=x)


@pytest.fixture
def make_dataset():
    return random_dataset


@pytest.fixture(scope="session")
def randomized_suite():
    """The fixed-seed battery of 1000 datasets shared by the acceptance checks."""
    rng = np.random.default_rng(20240917)
    return [random_dataset(rng) for _ in range(1000)]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        key = (marker.args[0], item.name)
        _ACCEPTANCE[key] = (marker.args[1], report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), (title, outcome) in sorted(_ACCEPTANCE.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} ({name})")
