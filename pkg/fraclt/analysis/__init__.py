"""
Additive functionals, limit verification and the registered checks.
"""

from .checks import CheckContext, CheckRegistry, check, expect_rejection
from .functionals import (
    functional,
    functional_series,
    occupation_density_check,
    quantile_envelope_regression,
    rate_regression,
    residual_series,
    residual_split,
    scaled_functional,
)
from .verification import (
    first_order_limit_test,
    lil_constants,
    lil_paired_test,
    lil_statistic,
    negative_control_rate,
    scaling_test,
    self_similarity_test,
    stationary_increment_test,
    statistic_ensemble,
    strong_approximation_test,
    sup_growth_test,
    translation_test,
)

__all__ = [
    "check",
    "CheckContext",
    "CheckRegistry",
    "expect_rejection",
    "first_order_limit_test",
    "functional",
    "functional_series",
    "lil_constants",
    "lil_paired_test",
    "lil_statistic",
    "negative_control_rate",
    "occupation_density_check",
    "quantile_envelope_regression",
    "rate_regression",
    "residual_series",
    "residual_split",
    "scaled_functional",
    "scaling_test",
    "self_similarity_test",
    "stationary_increment_test",
    "statistic_ensemble",
    "strong_approximation_test",
    "sup_growth_test",
    "translation_test",
]
