import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraclt.analysis.functionals import (
    functional,
    functional_series,
    occupation_density_check,
    quantile_envelope_regression,
    rate_regression,
    residual_series,
    residual_split,
    scaled_functional,
)
from fraclt.core.functions import GaussianBump, IndicatorInterval, SignedDifference
from fraclt.core.types import ResidualSeries
from fraclt.estimators.field import local_time_field
from fraclt.estimators.occupation import local_time_eps, occupation_time
from fraclt.exceptions import ValidationError
from fraclt.utils import make_generator

T_GRID = np.array([0.25, 0.5, 0.75, 1.0])


class TestFunctional:
    def test_indicator_matches_occupation_time(self, ramp_path):
        f = IndicatorInterval([0.0, 0.5, 1.0])
        assert functional(ramp_path, f, 1.0) == pytest.approx(occupation_time(ramp_path, (0.0, 0.5), (0.0, 1.0)).value)

    def test_empty_window(self, brownian_path):
        assert functional(brownian_path, GaussianBump(), 0.0) == 0.0

    def test_unit_scale_is_the_plain_functional(self, brownian_path):
        f = GaussianBump([1.0, 0.2, 0.5])
        assert scaled_functional(brownian_path, f, 1.0) == functional(brownian_path, f, 1.0)

    @given(st.floats(min_value=0.5, max_value=64.0))
    def test_scaled_functional_is_the_functional_of_the_stretched_path(self, make_path, brownian_path, lam):
        # Y(s) = lam^tau X(s / lam) on [0, lam T]
        f = GaussianBump([1.0, 0.2, 0.5])
        tau = brownian_path.spec.tau
        stretched = make_path(brownian_path.values * lam ** tau, horizon=lam * brownian_path.horizon, tau=tau)
        expected = lam ** (tau - 1.0) * functional(stretched, f, stretched.horizon)
        assert scaled_functional(brownian_path, f, lam) == pytest.approx(expected, rel=1e-10)

    def test_rejects_non_positive_scale(self, brownian_path):
        with pytest.raises(ValidationError):
            scaled_functional(brownian_path, GaussianBump(), -1.0)


class TestResiduals:
    def test_residual_definition(self, brownian_path):
        f = GaussianBump()
        series = residual_series(brownian_path, f, T_GRID)
        eps = 1.0 / 16.0
        expected = functional(brownian_path, f, 0.5) - f.f_bar * local_time_eps(brownian_path, 0.0, 0.5, eps)
        assert series.J[1] == pytest.approx(expected)
        assert series.tau == 0.5
        assert series.seed == brownian_path.seed

    def test_mean_zero_function_needs_negative_control_mode(self, brownian_path):
        with pytest.raises(ValidationError):
            residual_series(brownian_path, SignedDifference(), T_GRID)
        series = residual_series(brownian_path, SignedDifference(), T_GRID, negative_control=True)
        np.testing.assert_allclose(series.J, functional_series(brownian_path, SignedDifference(), T_GRID).J)

    def test_split_adds_up(self, brownian_path):
        f = GaussianBump()
        levels = np.linspace(-3.0, 3.0, 481)
        field = local_time_field(brownian_path, levels, T_GRID, bandwidth=1.0 / 16.0)
        J1, J2, J_field, J_direct = residual_split(brownian_path, f, 1.0, field, nu=0.25)
        assert J1 + J2 == pytest.approx(J_field, abs=1e-10)
        assert np.isfinite(J_direct)
        with pytest.raises(ValidationError):
            residual_split(brownian_path, f, 1.0, field, nu=0.0)


class TestOccupationDensity:
    def test_time_and_level_integrals_agree(self, brownian_path):
        f = GaussianBump()
        eps = 1.0 / 16.0
        levels = np.arange(brownian_path.values.min() - 2 * eps, brownian_path.values.max() + 2 * eps, eps / 8)
        field = local_time_field(brownian_path, levels, [1.0], bandwidth=eps)
        time_side, level_side, error = occupation_density_check(brownian_path, f, field, 1.0)
        assert error < 0.02
        assert time_side == pytest.approx(functional(brownian_path, f, 1.0))


class TestEnvelopeRegression:
    def _power_samples(self, exponent, replicates=60):
        t = np.geomspace(1.0, 1000.0, 32)
        scale = 0.5 + make_generator(4).random(replicates)
        return t, scale[:, None] * t[None, :] ** exponent

    def test_recovers_an_exact_power_law(self):
        t, samples = self._power_samples(0.3)
        fit = quantile_envelope_regression(t, samples, (10.0, 1000.0), n_boot=50, seed=1)
        assert fit.slope == pytest.approx(0.3, abs=1e-10)
        assert fit.ci_lo == pytest.approx(0.3, abs=1e-10)
        assert fit.ci_hi == pytest.approx(0.3, abs=1e-10)
        assert fit.n_replicates == 60
        assert fit.window == (10.0, 1000.0)

    def test_uses_magnitudes(self):
        t, samples = self._power_samples(0.6)
        fit = quantile_envelope_regression(t, -samples, (10.0, 1000.0), n_boot=10)
        assert fit.slope == pytest.approx(0.6, abs=1e-10)

    def test_bootstrap_is_seeded(self):
        t, samples = self._power_samples(0.4)
        noisy = samples * (1.0 + 0.2 * make_generator(8).standard_normal(samples.shape))
        a = quantile_envelope_regression(t, noisy, (10.0, 1000.0), n_boot=40, seed=3)
        b = quantile_envelope_regression(t, noisy, (10.0, 1000.0), n_boot=40, seed=3)
        assert (a.ci_lo, a.ci_hi) == (b.ci_lo, b.ci_hi)
        assert a.ci_lo <= a.slope + 0.1 and a.ci_hi >= a.slope - 0.1

    @pytest.mark.parametrize("window", [(10.0, 50.0), (0.0, 100.0), (100.0, 10.0)])
    def test_rejects_short_windows(self, window):
        t, samples = self._power_samples(0.3)
        with pytest.raises(ValidationError):
            quantile_envelope_regression(t, samples, window, n_boot=5)

    def test_rejects_small_ensembles(self):
        t, samples = self._power_samples(0.3, replicates=20)
        with pytest.raises(ValidationError):
            quantile_envelope_regression(t, samples, (10.0, 1000.0), n_boot=5)
        fit = quantile_envelope_regression(t, samples, (10.0, 1000.0), n_boot=5, min_replicates=20)
        assert fit.n_replicates == 20

    def test_rate_regression_requires_a_shared_grid(self):
        f = GaussianBump()
        a = ResidualSeries(t_grid=[1.0, 2.0], J=[0.1, 0.2], tau=0.5, f=f)
        b = ResidualSeries(t_grid=[1.0, 3.0], J=[0.1, 0.2], tau=0.5, f=f)
        with pytest.raises(ValidationError):
            rate_regression([a, b], (1.0, 10.0))
        with pytest.raises(ValidationError):
            rate_regression([], (1.0, 10.0))
