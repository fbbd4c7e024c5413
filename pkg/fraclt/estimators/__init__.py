"""
Local time estimators for the fraclt package.
"""

from .field import (
    default_level_grid,
    local_time_field,
    rescale_field,
    rescale_path,
    running_sup_stats,
    sup_diff_stats,
)
from .fourier import default_cutoff, local_time_fourier
from .occupation import (
    additivity_check,
    default_bandwidth,
    local_time_eps,
    occupation_time,
    shift_path,
    time_weights,
    translate_path,
)
from .regularity import HolderFit, bivariate_holder_exponents, time_holder_exponent

__all__ = [
    "additivity_check",
    "bivariate_holder_exponents",
    "default_bandwidth",
    "default_cutoff",
    "default_level_grid",
    "HolderFit",
    "local_time_eps",
    "local_time_field",
    "local_time_fourier",
    "occupation_time",
    "rescale_field",
    "rescale_path",
    "running_sup_stats",
    "shift_path",
    "sup_diff_stats",
    "time_holder_exponent",
    "time_weights",
    "translate_path",
]
