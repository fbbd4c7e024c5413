"""
Additive functionals int_0^t f(X(s)) ds, their strong-approximation residual
J(t) = int_0^t f(X) ds - f_bar L(0, t), and the quantile-envelope regression
used to read growth exponents off finite ensembles.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ..core.functions import TestFunction
from ..core.types import EstimatorType, Interval, LocalTimeField, PathGrid, RateFit, ResidualSeries
from ..estimators.occupation import default_bandwidth, local_time_eps, time_weights
from ..exceptions import ValidationError
from ..utils import make_generator

logger = logging.getLogger(__name__)

MIN_REPLICATES = 50
DEFAULT_QUANTILE = 0.9
DEFAULT_BOOTSTRAP = 1000


def functional(path: PathGrid, f: TestFunction, t: float) -> float:
    """
    Trapezoid quadrature of f(X(s)) over [0, t] on the path grid.

    Args:
        path: Sampled path
        f: Test function
        t: Time, <= T

    Returns:
        float: int_0^t f(X(s)) ds
    """
    i0, weights = time_weights(path, (0.0, t))
    if weights.size == 0:
        return 0.0
    return float(np.dot(weights, f(path.values[i0:i0 + weights.size])))


def _absolute_functional(path: PathGrid, f: TestFunction, t: float) -> float:
    i0, weights = time_weights(path, (0.0, t))
    if weights.size == 0:
        return 0.0
    return float(np.dot(weights, np.abs(f(path.values[i0:i0 + weights.size]))))


def scaled_functional(path: PathGrid, f: TestFunction, lam: float) -> float:
    """
    lam^{tau-1} int_0^{lam T} f(X(s)) ds evaluated through self-similarity.

    With X(lam u) equal in law to lam^tau X(u), the quantity equals
    lam^tau int_0^T f(lam^tau X(u)) du on the given path.
    """
    if not lam > 0.0:
        raise ValidationError(f"Scale factor must be positive, got {lam}")
    factor = lam ** path.spec.tau
    i0, weights = time_weights(path, (0.0, path.horizon))
    return float(factor * np.dot(weights, f(factor * path.values[i0:i0 + weights.size])))


def residual_series(
    path: PathGrid,
    f: TestFunction,
    t_grid: Sequence[float],
    lt_bandwidth: Optional[float] = None,
    negative_control: bool = False,
) -> ResidualSeries:
    """
    J(t) = functional(path, f, t) - f_bar * L_eps(0, t) on a time grid.

    Args:
        path: Sampled path
        f: Test function
        t_grid: Grid times of the path
        lt_bandwidth: Occupation bandwidth (defaults to dt^tau)
        negative_control: Allow f_bar = 0

    Returns:
        ResidualSeries: Residuals aligned with t_grid

    Raises:
        ValidationError: If f_bar = 0 outside negative-control mode
    """
    if not negative_control:
        f.require_nonzero_mean()
    eps = lt_bandwidth or default_bandwidth(path)
    f_bar = f.f_bar
    residuals = [
        functional(path, f, t) - f_bar * local_time_eps(path, 0.0, t, eps) for t in t_grid
    ]
    return ResidualSeries(
        t_grid=np.asarray(t_grid, dtype=float),
        J=np.asarray(residuals),
        tau=path.spec.tau,
        f=f,
        seed=path.seed,
    )


def functional_series(path: PathGrid, f: TestFunction, t_grid: Sequence[float]) -> ResidualSeries:
    """The functional itself as a series, for f_bar = 0 controls"""
    values = [functional(path, f, t) for t in t_grid]
    return ResidualSeries(
        t_grid=np.asarray(t_grid, dtype=float),
        J=np.asarray(values),
        tau=path.spec.tau,
        f=f,
        seed=path.seed,
    )


def _fit_log_log(t: np.ndarray, envelope: np.ndarray) -> Tuple[float, float]:
    slope, intercept = np.polyfit(np.log(t), np.log(envelope), 1)
    return float(slope), float(intercept)


def quantile_envelope_regression(
    t_grid: np.ndarray,
    samples: np.ndarray,
    fit_window: Interval,
    quantile: float = DEFAULT_QUANTILE,
    n_boot: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    min_replicates: int = MIN_REPLICATES,
) -> RateFit:
    """
    OLS of log(quantile over replicates of |samples|) on log t, with bootstrap CI.

    Args:
        t_grid: Times, length m
        samples: Replicates x times array
        fit_window: (t_lo, t_hi); t_hi / t_lo must be at least 10
        quantile: Envelope quantile
        n_boot: Bootstrap resamples of replicates
        seed: Seed of the bootstrap generator
        min_replicates: Smallest accepted ensemble

    Returns:
        RateFit: Slope with a percentile 95% interval

    Raises:
        ValidationError: On too few replicates or a degenerate window
    """
    t_grid = np.asarray(t_grid, dtype=float)
    magnitudes = np.abs(np.asarray(samples, dtype=float))
    if magnitudes.ndim != 2 or magnitudes.shape[1] != t_grid.size:
        raise ValidationError("Samples must be a replicates x times array matching t_grid")
    replicates = magnitudes.shape[0]
    if replicates < min_replicates:
        raise ValidationError(f"Need at least {min_replicates} replicates, got {replicates}")
    lo, hi = fit_window
    if not (0.0 < lo < hi) or hi / lo < 10.0:
        raise ValidationError(f"Fit window [{lo}, {hi}] must be positive and span a decade")
    in_window = (t_grid >= lo) & (t_grid <= hi)
    envelope = np.quantile(magnitudes[:, in_window], quantile, axis=0)
    usable = envelope > 0.0
    if np.count_nonzero(usable) < 3:
        raise ValidationError("Fewer than three window times with a positive envelope")
    t_fit = t_grid[in_window][usable]
    if t_fit[-1] / t_fit[0] < 10.0:
        raise ValidationError("Usable window times do not span a decade")
    slope, intercept = _fit_log_log(t_fit, envelope[usable])

    rng = make_generator(seed)
    window_samples = magnitudes[:, in_window][:, usable]
    boot = np.empty(n_boot)
    for b in range(n_boot):
        resample = window_samples[rng.integers(0, replicates, replicates)]
        boot_envelope = np.quantile(resample, quantile, axis=0)
        boot_envelope = np.maximum(boot_envelope, np.finfo(float).tiny)
        boot[b] = _fit_log_log(t_fit, boot_envelope)[0]
    ci_lo, ci_hi = np.percentile(boot, [2.5, 97.5]) if n_boot else (slope, slope)
    return RateFit(
        slope=slope,
        ci_lo=float(ci_lo),
        ci_hi=float(ci_hi),
        intercept=intercept,
        n_replicates=replicates,
        window=(float(lo), float(hi)),
    )


def rate_regression(
    series: Sequence[ResidualSeries],
    fit_window: Interval,
    quantile: float = DEFAULT_QUANTILE,
    n_boot: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    min_replicates: int = MIN_REPLICATES,
) -> RateFit:
    """
    Growth exponent of the residual ensemble's 0.9-quantile envelope.

    All series must share the same t grid.
    """
    if not series:
        raise ValidationError("Empty residual ensemble")
    t_grid = series[0].t_grid
    for s in series[1:]:
        if s.t_grid.shape != t_grid.shape or not np.array_equal(s.t_grid, t_grid):
            raise ValidationError("Residual series do not share a time grid")
    samples = np.vstack([s.J for s in series])
    return quantile_envelope_regression(
        t_grid, samples, fit_window, quantile=quantile, n_boot=n_boot, seed=seed,
        min_replicates=min_replicates,
    )


def occupation_density_check(
    path: PathGrid,
    f: TestFunction,
    field: LocalTimeField,
    t: float,
) -> Tuple[float, float, float]:
    """
    Compare int_0^t f(X) ds with int f(x) L(x, t) dx over the field's levels.

    Returns:
        Tuple (time integral, level integral, relative error), the error
        normalised by int_0^t |f(X)| ds
    """
    time_side = functional(path, f, t)
    level_side = float(integrate.trapezoid(f(field.x_grid) * field.column(t), field.x_grid))
    scale = _absolute_functional(path, f, t)
    if scale == 0.0:
        return time_side, level_side, 0.0 if level_side == 0.0 else math.inf
    return time_side, level_side, abs(time_side - level_side) / scale


def residual_split(
    path: PathGrid,
    f: TestFunction,
    t: float,
    field: LocalTimeField,
    nu: float,
    k: float = 2.0,
) -> Tuple[float, float, float, float]:
    """
    Split J over {|x| > t^a} and {|x| <= t^a} with a = nu tau / (nu + k).

    J1 + J2 equals the field-based residual int f(x) (L(x,t) - L(0,t)) dx by
    construction; it is compared with the direct residual to check the
    bookkeeping.

    Returns:
        Tuple (J1, J2, J_field, J_direct)
    """
    if not (nu > 0.0 and k > 0.0):
        raise ValidationError("nu and k must be positive")
    tau = path.spec.tau
    a = nu * tau / (nu + k)
    threshold = t ** a
    column = field.column(t)
    local_at_zero = float(np.interp(0.0, field.x_grid, column, left=0.0, right=0.0))
    weighted = f(field.x_grid) * column
    inner = np.abs(field.x_grid) <= threshold

    def level_integral(mask: np.ndarray) -> float:
        return float(integrate.trapezoid(np.where(mask, weighted, 0.0), field.x_grid))

    inner_mass = f.integral_over(-threshold, threshold)
    outer_mass = f.f_bar - inner_mass
    J1 = level_integral(~inner) - local_at_zero * outer_mass
    J2 = level_integral(inner) - local_at_zero * inner_mass
    J_field = level_integral(np.ones_like(inner)) - f.f_bar * local_at_zero
    eps = field.bandwidth if field.estimator == EstimatorType.EPS_OCCUPATION else default_bandwidth(path)
    J_direct = functional(path, f, t) - f.f_bar * local_time_eps(path, 0.0, t, eps)
    return J1, J2, J_field, J_direct
