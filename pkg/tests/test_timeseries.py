import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import psi_autocovariances, random_stationary_phi

from covreg.errors import NonStationaryModel, TooFewObservations, ZeroVariance
from covreg.timeseries import (
    ArModel,
    autocovariances,
    fit_ar_ols,
    fit_ar_unbiased,
    fit_ar_yule_walker,
    lagged_design,
    load_lake_huron,
    simulate_ar,
    theoretical_autocovariances,
    window_means,
    yule_walker_solve,
)

LAKE_LS = (1.64603783, 1.07193821, -0.36534923, 0.10875509)
LAKE_YW = (1.08870376, -0.40454359, 0.13075413)


class TestLaggedDesign:
    def test_order_one(self):
        d = lagged_design([1.0, 2.0, 3.0, 4.0], 1)
        np.testing.assert_array_equal(d.y, [2.0, 3.0, 4.0])
        np.testing.assert_array_equal(d.x[:, 0], [1.0, 2.0, 3.0])

    def test_order_two(self):
        d = lagged_design([1.0, 2.0, 3.0, 4.0, 5.0], 2)
        np.testing.assert_array_equal(d.y, [3.0, 4.0, 5.0])
        np.testing.assert_array_equal(d.x, [[2.0, 1.0], [3.0, 2.0], [4.0, 3.0]])

    def test_too_short(self):
        with pytest.raises(TooFewObservations):
            lagged_design([1.0, 2.0, 3.0], 2)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            lagged_design([1.0, 2.0, 3.0], 0)


class TestFits:
    def test_exact_halving_recursion(self):
        y = 0.5 ** np.arange(10) * 64.0
        for fitter in (fit_ar_unbiased, fit_ar_ols):
            fit = fitter(y, 1)
            assert fit.model.phi[0] == pytest.approx(0.5, abs=1e-12)
            assert fit.model.phi0 == pytest.approx(0.0, abs=1e-10)
            assert fit.n_effective == 9

    def test_lake_huron(self):
        y = load_lake_huron()
        assert y.shape == (98,)
        for fitter in (fit_ar_unbiased, fit_ar_ols):
            m = fitter(y, 3).model
            np.testing.assert_allclose((m.phi0,) + m.phi, LAKE_LS, atol=1e-6)
        np.testing.assert_allclose(fit_ar_yule_walker(y, 3).model.phi, LAKE_YW, atol=1e-6)

    def test_unbiased_equals_ols(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            p = int(rng.integers(1, 6))
            y = simulate_ar(ArModel(1.0, random_stationary_phi(rng, p)), int(rng.integers(p + 10, 300)),
                            seed=int(rng.integers(1 << 30)))
            a, b = fit_ar_unbiased(y, p).model, fit_ar_ols(y, p).model
            np.testing.assert_allclose((a.phi0,) + a.phi, (b.phi0,) + b.phi, rtol=1e-9, atol=1e-11)

    def test_window_mean_intercept_identity(self):
        y = load_lake_huron()
        for p in (1, 2, 3, 4):
            m = fit_ar_unbiased(y, p).model
            ybar = window_means(y, p)
            # Ybar_{p+1} - sum_i phi_i Ybar_{p+1-i}
            phi0 = ybar[p] - sum(m.phi[i - 1] * ybar[p - i] for i in range(1, p + 1))
            assert m.phi0 == pytest.approx(phi0, abs=1e-10)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_shift_invariance(self, seed):
        rng = np.random.default_rng(seed)
        p = int(rng.integers(1, 4))
        y = simulate_ar(ArModel(0.0, random_stationary_phi(rng, p)), 120, seed=seed)
        c = rng.uniform(-50, 50)
        for fitter in (fit_ar_unbiased, fit_ar_yule_walker):
            a, b = fitter(y, p).model, fitter(y + c, p).model
            np.testing.assert_allclose(b.phi, a.phi, atol=1e-9)
            assert b.phi0 == pytest.approx(a.phi0 + c * (1 - sum(a.phi)), abs=1e-8)

    def test_too_short_for_fit(self):
        with pytest.raises(TooFewObservations):
            fit_ar_unbiased([1.0, 2.0, 3.0, 5.0], 2)

    @pytest.mark.slow
    def test_consistency_large_n(self):
        truth = (0.4, 0.1, 0.3)
        y = simulate_ar(ArModel(2.0, truth), 100_000, seed=99)
        for fitter in (fit_ar_unbiased, fit_ar_ols, fit_ar_yule_walker):
            np.testing.assert_allclose(fitter(y, 3).model.phi, truth, atol=0.02)
        y1 = simulate_ar(ArModel(0.0, (0.5,)), 100_000, seed=100)
        assert fit_ar_unbiased(y1, 1).model.phi[0] == pytest.approx(0.5, abs=0.02)


class TestAutocovariances:
    def test_hand_example(self):
        acov = autocovariances([1.0, 2.0, 3.0, 4.0], 1)
        np.testing.assert_allclose(acov.gamma, [1.25, 0.3125], rtol=1e-15)
        assert acov.rho[1] == pytest.approx(0.25, rel=1e-15)

    def test_constant_series(self):
        with pytest.raises(ZeroVariance):
            autocovariances([2.0, 2.0, 2.0], 1)

    def test_white_noise_band(self):
        rng = np.random.default_rng(8)
        n = 4000
        rho = autocovariances(rng.standard_normal(n), 20).rho
        assert np.all(np.abs(rho[1:]) < 3 / np.sqrt(n))

    def test_yule_walker_order_one(self):
        assert fit_ar_yule_walker([1.0, 2.0, 3.0, 4.0], 1).model.phi[0] == pytest.approx(0.25, rel=1e-14)


class TestTheoretical:
    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_against_psi_weights(self, p, seed):
        rng = np.random.default_rng(seed)
        phi = random_stationary_phi(rng, p)
        sigma = rng.uniform(0.3, 3.0)
        ours = theoretical_autocovariances(ArModel(0.0, phi, sigma), 10).gamma
        ref = psi_autocovariances(phi, sigma, 10)
        np.testing.assert_allclose(ours, ref, rtol=1e-9, atol=1e-11 * ref[0])

    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_yule_walker_recovers_phi(self, p, seed):
        rng = np.random.default_rng(seed)
        phi = random_stationary_phi(rng, p)
        ref = psi_autocovariances(phi, 1.0, p)
        np.testing.assert_allclose(yule_walker_solve(ref / ref[0], p), phi, atol=1e-10)

    def test_ar1_closed_form(self):
        g = theoretical_autocovariances(ArModel(0.0, (0.5,), 1.0), 3).gamma
        np.testing.assert_allclose(g, [4 / 3, 2 / 3, 1 / 3, 1 / 6], rtol=1e-12)

    def test_nonstationary(self):
        with pytest.raises(NonStationaryModel):
            theoretical_autocovariances(ArModel(0.0, (1.0,)), 3)


class TestSimulate:
    def test_deterministic(self):
        m = ArModel(1.0, (0.4, 0.1, 0.3))
        a, b = simulate_ar(m, 200, seed=3), simulate_ar(m, 200, seed=3)
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, simulate_ar(m, 200, seed=4))

    def test_zero_noise_sits_at_mean(self):
        m = ArModel(2.0, (0.5, 0.2), sigma=0.0)
        np.testing.assert_allclose(simulate_ar(m, 50), m.mean, rtol=1e-14)

    def test_nonstationary_refused(self):
        with pytest.raises(NonStationaryModel):
            simulate_ar(ArModel(0.0, (1.1,)), 10)

    def test_nonstationary_override(self):
        y = simulate_ar(ArModel(0.0, (1.0,), sigma=0.0), 5, burn_in=0, allow_nonstationary=True)
        np.testing.assert_array_equal(y, np.zeros(5))

    def test_sample_moments_match_theory(self):
        m = ArModel(0.0, (0.6, -0.2), 1.5)
        y = simulate_ar(m, 200_000, seed=12)
        theory = theoretical_autocovariances(m, 3).gamma
        np.testing.assert_allclose(autocovariances(y, 3).gamma, theory, rtol=0.05, atol=0.02)
