import pytest

from fraclt.core.client import SimulationClient
from fraclt.core.types import ProcessKind, ProcessSpec
from fraclt.estimators.regularity import bivariate_holder_exponents, time_holder_exponent
from fraclt.exceptions import ValidationError


@pytest.fixture(scope="module")
def brownian_paths():
    spec = ProcessSpec(kind=ProcessKind.FBM, tau=0.5, horizon=1.0, n_steps=512)
    return SimulationClient().collect(spec, 80, master_seed=17)


class TestTimeHolder:
    def test_brownian_slope(self, brownian_paths):
        fit = time_holder_exponent(brownian_paths, 0.5, [0.25, 0.125, 0.0625, 0.03125])
        assert fit.expected == (0.5,)
        assert 0.25 < fit.slopes[0] < 0.85
        assert fit.n_replicates == 80

    def test_needs_two_paths_and_lags(self, brownian_paths):
        with pytest.raises(ValidationError):
            time_holder_exponent(brownian_paths[:1], 0.5, [0.25, 0.125])
        with pytest.raises(ValidationError):
            time_holder_exponent(brownian_paths, 0.5, [0.25])


class TestBivariateHolder:
    def test_expected_exponents(self, brownian_paths):
        fit = bivariate_holder_exponents(
            brownian_paths, 0.5, [0.25, 0.125, 0.0625], [0.125, 0.25, 0.5], nu=0.25,
        )
        assert fit.expected == (0.25, pytest.approx(0.375))
        assert len(fit.slopes) == 2

    def test_needs_two_offsets(self, brownian_paths):
        with pytest.raises(ValidationError):
            bivariate_holder_exponents(brownian_paths, 0.5, [0.25, 0.125], [0.1], nu=0.25)
