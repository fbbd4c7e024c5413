import math

import numpy as np
import pytest

from fraclt.estimators.fourier import default_cutoff, frequency_grid, local_time_fourier
from fraclt.exceptions import ValidationError


class TestFrequencyGrid:
    def test_tapered_weights(self):
        u, weights = frequency_grid(10.0, 101)
        assert u[0] == -10.0 and u[-1] == 10.0
        assert weights[0] == 0.0 and weights[-1] == 0.0
        # triangle of height du / 2pi with base 2U integrates to U / 2pi
        assert weights.sum() == pytest.approx(10.0 / (2 * math.pi), rel=1e-12)

    def test_untapered_weights(self):
        _, weights = frequency_grid(10.0, 101, taper=False)
        np.testing.assert_allclose(weights, 0.2 / (2 * math.pi))

    @pytest.mark.parametrize("cutoff, n_freq", [(0.0, 64), (-1.0, 64), (5.0, 15)])
    def test_rejects_bad_arguments(self, cutoff, n_freq):
        with pytest.raises(ValidationError):
            frequency_grid(cutoff, n_freq)

    def test_default_cutoff(self):
        assert default_cutoff(0.5) == pytest.approx(2 * math.pi)


class TestLocalTimeFourier:
    def test_constant_path_peak(self, make_path):
        # occupation measure t * delta_0 yields the Fejer peak t U / 2pi
        path = make_path(np.zeros(9), horizon=2.0)
        assert local_time_fourier(path, 0.0, 2.0, 20.0, n_freq=1025) == pytest.approx(2.0 * 20.0 / (2 * math.pi), rel=1e-12)

    def test_constant_path_fejer_shape(self, make_path):
        path = make_path(np.zeros(9))
        U, x = 20.0, 0.3
        expected = (1.0 - math.cos(U * x)) / (math.pi * U * x ** 2)
        assert local_time_fourier(path, x, 1.0, U, n_freq=8193) == pytest.approx(expected, rel=1e-3)

    def test_nonnegative(self, brownian_path):
        for x in np.linspace(-1.0, 1.0, 9):
            assert local_time_fourier(brownian_path, x, 1.0, default_cutoff(1.0 / 16.0), n_freq=512) >= 0.0

    def test_empty_window(self, brownian_path):
        assert local_time_fourier(brownian_path, 0.0, 0.0, 10.0) == 0.0

    def test_close_to_occupation_estimate_where_the_path_spends_time(self, brownian_path):
        from fraclt.estimators.occupation import local_time_eps

        eps = 1.0 / 16.0
        x = float(np.median(brownian_path.values))
        fourier = local_time_fourier(brownian_path, x, 1.0, default_cutoff(eps))
        occupation = local_time_eps(brownian_path, x, 1.0, eps)
        assert fourier == pytest.approx(occupation, rel=0.5)
