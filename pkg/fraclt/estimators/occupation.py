"""
Occupation measures and the epsilon-occupation local time estimator.

All time integrals over a window [b0, b1] use the same grid weights: dt for
interior grid points and dt/2 at the two window endpoints. Functionals and
occupation times therefore agree exactly for indicator integrands, and local
times are additive across a split point.
"""

import logging
import math
from typing import Tuple

import numpy as np

from ..core.types import Interval, OccupationEstimate, PathGrid
from ..exceptions import ValidationError
from ..utils import validate_interval

logger = logging.getLogger(__name__)

_GRID_SLACK = 1e-9


def window_indices(path: PathGrid, window: Interval) -> Tuple[int, int]:
    """
    Grid indices of the first and last grid time inside a time window.

    Returns (i0, i1) with i1 < i0 when the window holds no grid time.
    """
    lo, hi = window
    validate_interval(lo, hi, "time window")
    if lo < -_GRID_SLACK * path.dt or hi > path.horizon * (1.0 + _GRID_SLACK):
        raise ValidationError(f"Time window [{lo}, {hi}] is not within [0, {path.horizon}]")
    i0 = max(0, int(math.ceil(lo / path.dt - _GRID_SLACK)))
    i1 = min(path.spec.n_steps, int(math.floor(hi / path.dt + _GRID_SLACK)))
    return i0, i1


def time_weights(path: PathGrid, window: Interval) -> Tuple[int, np.ndarray]:
    """
    Quadrature weights of the grid points inside a time window.

    Args:
        path: Sampled path
        window: Time window [b0, b1] within [0, T]

    Returns:
        Tuple of the first index and the weight array for indices i0..i1
        (empty when the window covers fewer than two grid points)
    """
    i0, i1 = window_indices(path, window)
    if i1 <= i0:
        return i0, np.zeros(0)
    weights = np.full(i1 - i0 + 1, path.dt)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return i0, weights


def occupation_time(path: PathGrid, level_set: Interval, window: Interval) -> OccupationEstimate:
    """
    Time the path spends in A = [lo, hi] during the window B.

    Args:
        path: Sampled path
        level_set: Interval A (infinite ends allowed)
        window: Time window B within [0, T]

    Returns:
        OccupationEstimate: Weighted count of grid points of B with values in A
    """
    lo, hi = level_set
    validate_interval(lo, hi, "level set")
    i0, weights = time_weights(path, window)
    if weights.size == 0:
        value = 0.0
    else:
        segment = path.values[i0:i0 + weights.size]
        inside = (segment >= lo) & (segment <= hi)
        value = float(np.dot(weights, inside))
    return OccupationEstimate(
        set_lo=lo,
        set_hi=hi,
        window_lo=window[0],
        window_hi=window[1],
        value=value,
    )


def default_bandwidth(path: PathGrid, scale: float = 1.0) -> float:
    """eps = c * dt^tau, matched to the path modulus over one grid cell"""
    if not scale > 0.0:
        raise ValidationError(f"Bandwidth scale must be positive, got {scale}")
    return scale * path.dt ** path.spec.tau


def local_time_eps(path: PathGrid, x: float, t: float, eps: float) -> float:
    """
    Epsilon-occupation estimate of the local time L(x, t).

    Args:
        path: Sampled path
        x: Level
        t: Time, <= T
        eps: Half-width of the occupation tube, > 0

    Returns:
        float: occupation_time(path, [x - eps, x + eps], [0, t]) / (2 eps)
    """
    if not eps > 0.0:
        raise ValidationError(f"Bandwidth must be positive, got {eps}")
    estimate = occupation_time(path, (x - eps, x + eps), (0.0, t))
    return estimate.value / (2.0 * eps)


def shift_path(path: PathGrid, s: float) -> PathGrid:
    """
    Restrict a path to [s, T] and re-base time to start at 0.

    Values are kept as they are; the new origin is X(s).
    """
    index = path.index_of(s)
    spec = path.spec.replace(horizon=path.horizon - index * path.dt, n_steps=path.spec.n_steps - index)
    values = path.values[index:]
    metadata = dict(path.metadata)
    metadata["shifted_by"] = s
    return PathGrid(
        times=spec.times(),
        values=values,
        spec=spec,
        seed=path.seed,
        origin=float(values[0]),
        metadata=metadata,
    )


def translate_path(path: PathGrid, z: float) -> PathGrid:
    """The same path started at z instead of its origin"""
    values = path.values + z
    metadata = dict(path.metadata)
    metadata["translated_by"] = z
    return PathGrid(
        times=path.times,
        values=values,
        spec=path.spec,
        seed=path.seed,
        origin=float(values[0]),
        metadata=metadata,
    )


def additivity_check(path: PathGrid, x: float, s: float, t: float, eps: float) -> Tuple[float, float]:
    """
    Both sides of L(x, t) = L(x, s) + L(x, t - s) o theta_s.

    Args:
        path: Sampled path
        x: Level
        s: Split time, 0 <= s <= t (snapped down to the grid)
        t: Final time, <= T
        eps: Bandwidth

    Returns:
        Tuple (lhs, rhs) for direct comparison
    """
    if not 0.0 <= s <= t <= path.horizon * (1.0 + _GRID_SLACK):
        raise ValidationError(f"Additivity needs 0 <= s <= t <= T, got s={s}, t={t}")
    # off-grid times fall back to the last grid time, as in every window
    _, split = window_indices(path, (0.0, s))
    _, end = window_indices(path, (0.0, t))
    lhs = local_time_eps(path, x, t, eps)
    rhs = local_time_eps(path, x, s, eps)
    if split < end:
        shifted = shift_path(path, split * path.dt)
        rhs += local_time_eps(shifted, x, (end - split) * shifted.dt, eps)
    return lhs, rhs
