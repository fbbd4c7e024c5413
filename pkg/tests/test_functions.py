import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from fraclt.core.functions import (
    CompactBump,
    GaussianBump,
    IndicatorInterval,
    SignedDifference,
    TestFunctionRegistry,
    combine,
)
from fraclt.core.types import FunctionId
from fraclt.exceptions import ConfigurationError, ValidationError


def _numeric_integral(f):
    lo, hi = f.support()
    lo = max(lo, -20.0)
    hi = min(hi, 20.0)
    points = [p for p in range(-5, 6) if lo < p < hi]
    value, _ = integrate.quad(lambda x: float(f(x)), lo, hi, points=points or None, limit=400)
    return value


class TestFamilies:
    def test_defaults(self):
        f = GaussianBump()
        assert f.params == (1.0, 0.0, 1.0)
        assert f.f_bar == pytest.approx(math.sqrt(2 * math.pi))
        assert SignedDifference().params == (1.0, 0.0, 1.0, 1.0)

    def test_partial_params_take_defaults(self):
        assert GaussianBump([2.0]).params == (2.0, 0.0, 1.0)

    def test_too_many_params(self):
        with pytest.raises(ValidationError):
            GaussianBump([1.0, 0.0, 1.0, 5.0])

    @pytest.mark.parametrize("f", [
        GaussianBump([2.0, 0.5, 0.3]),
        CompactBump([1.5, -0.2, 0.7]),
        IndicatorInterval([-0.5, 1.5, 2.0]),
        SignedDifference([1.0, 0.3, 0.4, 0.8]),
    ], ids=repr)
    def test_f_bar_matches_quadrature(self, f):
        assert f.f_bar == pytest.approx(_numeric_integral(f), rel=1e-7, abs=1e-9)

    def test_compact_support(self):
        f = CompactBump([1.0, 2.0, 0.5])
        assert f.support() == (1.5, 2.5)
        np.testing.assert_array_equal(f(np.array([1.5, 2.5, 0.0, 3.0])), 0.0)
        assert f(2.0) == pytest.approx(1.0)

    def test_indicator_is_closed(self):
        f = IndicatorInterval([0.0, 1.0, 3.0])
        np.testing.assert_array_equal(f(np.array([-0.1, 0.0, 0.5, 1.0, 1.1])), [0.0, 3.0, 3.0, 3.0, 0.0])

    @pytest.mark.parametrize("f, params", [
        (GaussianBump, [1.0, 0.0, 0.0]),
        (CompactBump, [1.0, 0.0, -1.0]),
        (IndicatorInterval, [1.0, 1.0]),
        (SignedDifference, [1.0, 0.0, 0.0]),
    ])
    def test_invalid_params(self, f, params):
        with pytest.raises(ValidationError):
            f(params)


class TestMoments:
    @given(st.floats(min_value=0.1, max_value=4.0))
    def test_indicator_closed_form(self, k):
        f = IndicatorInterval([-0.5, 2.0, -1.5])
        value, _ = integrate.quad(lambda x: abs(x) ** k * 1.5, -0.5, 2.0, points=[0.0])
        assert f.k_moment(k) == pytest.approx(value, rel=1e-9)

    def test_gaussian_second_moment(self):
        assert GaussianBump([1.0, 0.0, 2.0]).k_moment(2.0) == pytest.approx(8.0 * math.sqrt(2 * math.pi), rel=1e-8)

    def test_rejects_non_positive_order(self):
        with pytest.raises(ValidationError):
            GaussianBump().k_moment(0.0)

    def test_integral_over(self):
        f = IndicatorInterval([0.0, 1.0, 1.0])
        assert f.integral_over(-5.0, 0.5) == pytest.approx(0.5)
        assert f.integral_over(2.0, 3.0) == 0.0


class TestMeanZero:
    def test_signed_difference_is_a_control(self):
        with pytest.raises(ValidationError):
            SignedDifference().require_nonzero_mean()
        GaussianBump().require_nonzero_mean()


class TestCombination:
    def test_linear(self):
        g = GaussianBump()
        h = IndicatorInterval()
        combo = combine((2.0, g), (-1.0, h))
        assert combo.f_bar == pytest.approx(2.0 * g.f_bar - h.f_bar)
        x = np.linspace(-2.0, 2.0, 9)
        np.testing.assert_allclose(combo(x), 2.0 * g(x) - h(x))
        assert combo.breakpoints() == (-1.0, 1.0)

    def test_empty(self):
        with pytest.raises(ValidationError):
            combine()


class TestRegistry:
    def test_registered_families(self):
        assert set(TestFunctionRegistry.list()) >= {
            FunctionId.GAUSSIAN_BUMP,
            FunctionId.COMPACT_BUMP,
            FunctionId.INDICATOR_INTERVAL,
            FunctionId.SIGNED_DIFFERENCE,
        }

    def test_create(self):
        f = TestFunctionRegistry.create(FunctionId.COMPACT_BUMP, [2.0])
        assert isinstance(f, CompactBump)
        assert f.params == (2.0, 0.0, 1.0)

    def test_unknown(self):
        with pytest.raises(ConfigurationError):
            TestFunctionRegistry.get("sawtooth")
