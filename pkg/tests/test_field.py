import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fraclt.core.types import EstimatorType, LocalTimeField, ProcessKind, ProcessSpec
from fraclt.estimators.field import (
    default_level_grid,
    holder_range,
    local_time_field,
    rescale_field,
    rescale_path,
    running_sup_stats,
    sup_diff_stats,
)
from fraclt.estimators.fourier import default_cutoff, local_time_fourier
from fraclt.estimators.occupation import local_time_eps
from fraclt.exceptions import ValidationError

T_GRID = [0.25, 0.5, 0.75, 1.0]


def _toy_field(columns, tau=0.5):
    values = np.asarray(columns, dtype=float).T
    return LocalTimeField(
        x_grid=np.arange(values.shape[0], dtype=float),
        t_grid=np.arange(1, values.shape[1] + 1, dtype=float),
        values=values,
        estimator=EstimatorType.EPS_OCCUPATION,
        bandwidth=0.5,
        source_spec=ProcessSpec(kind=ProcessKind.FBM, tau=tau, horizon=float(values.shape[1]), n_steps=values.shape[1]),
        value_range=(0.0, float(values.shape[0] - 1)),
    )


class TestLocalTimeField:
    def test_eps_field_matches_pointwise_estimator(self, brownian_path):
        eps = 1.0 / 16.0
        levels = default_level_grid(brownian_path, eps, 33)
        field = local_time_field(brownian_path, levels, T_GRID, bandwidth=eps)
        expected = [[local_time_eps(brownian_path, x, t, eps) for t in T_GRID] for x in levels]
        np.testing.assert_allclose(field.values, expected, rtol=1e-12, atol=1e-12)
        assert field.values.shape == (33, 4)
        assert field.bandwidth == eps

    def test_fourier_field_first_column_matches_pointwise_estimator(self, brownian_path):
        cutoff = default_cutoff(1.0 / 16.0)
        levels = np.linspace(-0.5, 0.5, 11)
        field = local_time_field(brownian_path, levels, T_GRID, estimator=EstimatorType.FOURIER, bandwidth=cutoff, n_freq=256)
        expected = [local_time_fourier(brownian_path, x, T_GRID[0], cutoff, n_freq=256) for x in levels]
        np.testing.assert_allclose(field.values[:, 0], expected, rtol=1e-9, atol=1e-9)
        assert field.metadata["n_freq"] == 256

    @pytest.mark.parametrize("estimator", EstimatorType.ALL)
    def test_nonnegative_and_nondecreasing(self, brownian_path, estimator):
        levels = default_level_grid(brownian_path, 1.0 / 16.0, 65)
        field = local_time_field(brownian_path, levels, T_GRID, estimator=estimator, n_freq=256)
        assert np.all(field.values >= 0.0)
        assert np.all(np.diff(field.values, axis=1) >= 0.0)

    def test_threads_do_not_change_the_result(self, brownian_path):
        levels = default_level_grid(brownian_path, 1.0 / 16.0, 257)
        serial = local_time_field(brownian_path, levels, T_GRID)
        parallel = local_time_field(brownian_path, levels, T_GRID, workers=4)
        assert np.array_equal(serial.values, parallel.values)

    def test_value_range_tracks_visited_values(self, brownian_path):
        field = local_time_field(brownian_path, [-1.0, 0.0, 1.0], [0.5])
        head = brownian_path.values[:129]
        assert field.value_range == (head.min(), head.max())

    def test_rejections(self, brownian_path):
        with pytest.raises(ValidationError):
            local_time_field(brownian_path, [1.0, 0.0], T_GRID)
        with pytest.raises(ValidationError):
            local_time_field(brownian_path, [0.0, 1.0], [0.5, 0.25])
        with pytest.raises(ValidationError):
            local_time_field(brownian_path, [0.0, 1.0], T_GRID, estimator="kernel")
        with pytest.raises(ValidationError):
            local_time_field(brownian_path, [0.0, 1.0], T_GRID, bandwidth=-1.0)
        with pytest.raises(ValidationError):
            local_time_field(brownian_path, [0.0, 1.0], [0.3])
        with pytest.raises(ValidationError):
            local_time_field(brownian_path, [0.0, 0.1, 0.3], T_GRID)

    def test_default_level_grid(self, brownian_path):
        levels = default_level_grid(brownian_path, 0.1, 5)
        assert levels[0] == pytest.approx(brownian_path.values.min() - 0.1)
        assert levels[-1] == pytest.approx(brownian_path.values.max() + 0.1)
        with pytest.raises(ValidationError):
            default_level_grid(brownian_path, 0.1, 1)


class TestSupStatistics:
    def test_sup_diff(self):
        field = _toy_field([[0.0, 1.0, 1.0, 3.0]])
        Z, K = sup_diff_stats(field, 1.0, 0.25)
        assert K == 3.0
        assert Z == pytest.approx(3.0 ** 0.75)

    @given(
        st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=32, max_size=32),
        st.floats(min_value=0.01, max_value=0.49),
    )
    def test_sup_diff_matches_all_pairs(self, column, nu):
        Z, K = sup_diff_stats(_toy_field([column]), 1.0, nu)
        pairs = itertools.combinations(range(len(column)), 2)
        expected = max(abs(column[j] - column[i]) / (j - i) ** nu for i, j in pairs)
        assert Z == pytest.approx(expected, rel=1e-12, abs=1e-300)
        assert K == max(column) - min(column)

    def test_running_sups_are_nondecreasing(self):
        field = _toy_field([[0.0, 1.0, 1.0, 3.0], [0.0, 0.0, 0.0, 0.0], [0.0, 2.0, 2.0, 6.0]])
        Y, K = running_sup_stats(field, 0.25)
        np.testing.assert_allclose(K, [3.0, 3.0, 6.0])
        np.testing.assert_allclose(Y, [3.0 ** 0.75, 3.0 ** 0.75, 2 * 3.0 ** 0.75])

    @pytest.mark.parametrize("nu", [0.0, 0.5, 0.7])
    def test_nu_outside_admissible_range(self, nu):
        assert holder_range(0.5) == 0.5
        with pytest.raises(ValidationError):
            sup_diff_stats(_toy_field([[0.0, 1.0, 1.0, 3.0]]), 1.0, nu)

    def test_off_grid_time(self):
        with pytest.raises(ValidationError):
            sup_diff_stats(_toy_field([[0.0, 1.0, 1.0, 3.0]]), 0.5, 0.25)


class TestRescaling:
    def test_rescale_path(self, brownian_path):
        scaled = rescale_path(brownian_path, 4.0)
        assert scaled.horizon == pytest.approx(0.25)
        assert scaled.spec.n_steps == brownian_path.spec.n_steps
        np.testing.assert_allclose(scaled.values, brownian_path.values / 2.0)

    def test_rescale_field(self):
        field = _toy_field([[0.0, 1.0, 1.0, 3.0], [0.0, 2.0, 2.0, 6.0]])
        scaled = rescale_field(field, 4.0)
        np.testing.assert_allclose(scaled.x_grid, field.x_grid / 2.0)
        np.testing.assert_allclose(scaled.t_grid, field.t_grid / 4.0)
        np.testing.assert_allclose(scaled.values, field.values / 2.0)
        assert scaled.bandwidth == pytest.approx(0.25)
        assert scaled.metadata["rescaled_by"] == 4.0

    def test_rejects_non_positive_scale(self, brownian_path):
        with pytest.raises(ValidationError):
            rescale_path(brownian_path, 0.0)
