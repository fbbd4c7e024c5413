"""
Local time fields on a level/time grid and the sup-difference statistics
built from them.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.types import EstimatorType, LocalTimeField, PathGrid
from ..exceptions import ValidationError
from ..utils import validate_sorted
from .fourier import DEFAULT_FREQUENCIES, frequency_grid

logger = logging.getLogger(__name__)

DEFAULT_LEVELS = 257
_LEVEL_CHUNK = 64
_CHUNK_ELEMENTS = 1 << 22


def default_level_grid(path: PathGrid, eps: float, n_levels: int = DEFAULT_LEVELS) -> np.ndarray:
    """Uniform levels spanning [min X - eps, max X + eps]"""
    if n_levels < 2:
        raise ValidationError(f"Need at least two levels, got {n_levels}")
    return np.linspace(path.values.min() - eps, path.values.max() + eps, n_levels)


def _time_indices(path: PathGrid, t_grid: np.ndarray) -> np.ndarray:
    return np.array([path.index_of(t) for t in t_grid], dtype=int)


def _eps_columns(values: np.ndarray, dt: float, levels: np.ndarray, indices: np.ndarray, eps: float) -> np.ndarray:
    # membership of every grid point in every level's tube, cumulated in time
    inside = (np.abs(values[None, :] - levels[:, None]) <= eps).astype(float)
    prefix = np.cumsum(inside, axis=1)
    total = prefix[:, indices] - 0.5 * inside[:, [0]] - 0.5 * inside[:, indices]
    total[:, indices == 0] = 0.0
    return total * (dt / (2.0 * eps))


def _fourier_columns(
    values: np.ndarray,
    dt: float,
    levels: np.ndarray,
    indices: np.ndarray,
    cutoff: float,
    n_freq: int,
) -> np.ndarray:
    u, u_weight = frequency_grid(cutoff, n_freq)
    result = np.zeros((levels.size, indices.size))
    chunk = max(1, _CHUNK_ELEMENTS // max(values.size, 1))
    for start in range(0, u.size, chunk):
        u_chunk = u[start:start + chunk]
        phase = np.outer(u_chunk, values)
        columns = []
        for part in (np.cos(phase), np.sin(phase)):
            prefix = np.cumsum(part, axis=1) * dt
            window = prefix[:, indices] - 0.5 * dt * (part[:, [0]] + part[:, indices])
            window[:, indices == 0] = 0.0
            columns.append(window)
        real, imag = columns
        level_phase = np.outer(levels, u_chunk)
        weight = u_weight[start:start + chunk]
        result += (np.cos(level_phase) * weight) @ real + (np.sin(level_phase) * weight) @ imag
    return result


def local_time_field(
    path: PathGrid,
    x_grid: Sequence[float],
    t_grid: Sequence[float],
    estimator: str = EstimatorType.EPS_OCCUPATION,
    bandwidth: Optional[float] = None,
    n_freq: int = DEFAULT_FREQUENCIES,
    workers: int = 1,
) -> LocalTimeField:
    """
    Estimate L(x, t) on a rectangular grid.

    Args:
        path: Sampled path
        x_grid: Increasing levels
        t_grid: Increasing grid times of the path
        estimator: EstimatorType.EPS_OCCUPATION or EstimatorType.FOURIER
        bandwidth: eps for the occupation estimator, cutoff U for the Fourier one;
            defaults to dt^tau and pi / dt^tau respectively
        n_freq: Number of frequencies (Fourier only)
        workers: Threads used over level chunks

    Returns:
        LocalTimeField: Nonnegative field, nondecreasing in t

    Raises:
        ValidationError: On unsorted or unevenly spaced levels, unsorted times,
            unknown estimator or bandwidth <= 0
    """
    levels = validate_sorted(x_grid, "x_grid")
    times = validate_sorted(t_grid, "t_grid")
    steps = np.diff(levels)
    if steps.size and not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise ValidationError("x_grid must be uniformly spaced")
    if estimator not in EstimatorType.ALL:
        raise ValidationError(f"Unknown estimator: {estimator}")
    eps_default = path.dt ** path.spec.tau
    if bandwidth is None:
        bandwidth = eps_default if estimator == EstimatorType.EPS_OCCUPATION else np.pi / eps_default
    if not bandwidth > 0.0:
        raise ValidationError(f"Bandwidth must be positive, got {bandwidth}")
    indices = _time_indices(path, times)
    values = np.asarray(path.values)

    def evaluate(chunk: np.ndarray) -> np.ndarray:
        if estimator == EstimatorType.EPS_OCCUPATION:
            return _eps_columns(values, path.dt, chunk, indices, bandwidth)
        return _fourier_columns(values, path.dt, chunk, indices, bandwidth, n_freq)

    chunks = [levels[i:i + _LEVEL_CHUNK] for i in range(0, levels.size, _LEVEL_CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(evaluate, chunks))
    else:
        parts = [evaluate(chunk) for chunk in chunks]
    field_values = np.vstack(parts)

    metadata = {"n_levels": int(levels.size), "n_times": int(times.size)}
    if estimator == EstimatorType.FOURIER:
        negative = field_values < 0.0
        clipped = int(np.count_nonzero(negative))
        field_values = np.where(negative, 0.0, field_values)
        monotone = np.maximum.accumulate(field_values, axis=1)
        adjusted = int(np.count_nonzero(monotone > field_values))
        field_values = monotone
        metadata.update({"n_freq": int(n_freq), "clipped": clipped, "monotone_adjusted": adjusted})
        if clipped:
            logger.warning("Clipped %d negative Fourier local time estimates", clipped)

    visited = values[: indices.max() + 1]
    return LocalTimeField(
        x_grid=levels,
        t_grid=times,
        values=field_values,
        estimator=estimator,
        bandwidth=float(bandwidth),
        source_spec=path.spec,
        value_range=(float(visited.min()), float(visited.max())),
        metadata=metadata,
    )


def holder_range(tau: float) -> float:
    """Upper end (1 - tau) / (2 tau) of the admissible spatial Holder orders"""
    return (1.0 - tau) / (2.0 * tau)


def _check_nu(nu: float, tau: float) -> None:
    upper = holder_range(tau)
    if not 0.0 < nu < upper:
        raise ValidationError(f"nu must lie in (0, {upper}) for tau={tau}, got {nu}")


def _visited_levels(field: LocalTimeField) -> np.ndarray:
    lo, hi = field.value_range
    mask = (field.x_grid >= lo) & (field.x_grid <= hi)
    if np.count_nonzero(mask) < 2:
        raise ValidationError("Need at least two levels within the visited range")
    return mask


def _sup_quotient(column: np.ndarray, dx: float, nu: float) -> float:
    best = 0.0
    for lag in range(1, column.size):
        difference = np.abs(column[lag:] - column[:-lag]).max()
        best = max(best, float(difference) / (lag * dx) ** nu)
    return best


def sup_diff_stats(field: LocalTimeField, t: float, nu: float) -> Tuple[float, float]:
    """
    Sup-difference statistics of the field at time t.

    Z is the largest nu-Holder quotient |L(x,t) - L(y,t)| / |x - y|^nu over
    pairs of visited grid levels; K the largest absolute difference.

    Args:
        field: Local time field
        t: Time on the field's t grid
        nu: Holder order in (0, (1 - tau) / (2 tau))

    Returns:
        Tuple (Z, K)
    """
    _check_nu(nu, field.source_spec.tau)
    mask = _visited_levels(field)
    column = field.column(t)[mask]
    K = float(column.max() - column.min())
    Z = _sup_quotient(column, field.dx, nu)
    return Z, K


def running_sup_stats(field: LocalTimeField, nu: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Running suprema over the t grid.

    Y(t) = sup_{s<=t} Z(s) and K(t) = sup_{s<=t} sup_{x,y} |L(x,s) - L(y,s)|.

    Returns:
        Tuple of nondecreasing arrays (Y, K) aligned with field.t_grid
    """
    _check_nu(nu, field.source_spec.tau)
    mask = _visited_levels(field)
    block = field.values[mask]
    K = block.max(axis=0) - block.min(axis=0)
    Z = np.array([_sup_quotient(block[:, j], field.dx, nu) for j in range(block.shape[1])])
    return np.maximum.accumulate(Z), np.maximum.accumulate(K)


def rescale_path(path: PathGrid, lam: float) -> PathGrid:
    """
    The path u -> lam^{-tau} X(lam u) on [0, T / lam], same number of steps.

    Equal in law to the process itself by self-similarity.
    """
    if not lam > 0.0:
        raise ValidationError(f"Scale factor must be positive, got {lam}")
    spec = path.spec.replace(horizon=path.horizon / lam)
    factor = lam ** (-path.spec.tau)
    metadata = dict(path.metadata)
    metadata["rescaled_by"] = lam
    return PathGrid(
        times=spec.times(),
        values=path.values * factor,
        spec=spec,
        seed=path.seed,
        origin=path.origin * factor,
        metadata=metadata,
    )


def rescale_field(field: LocalTimeField, lam: float) -> LocalTimeField:
    """
    Apply {L(x, t)} -> {lam^{tau-1} L(x lam^tau, lam t)} to the grid bookkeeping.

    Level x_k of the result reads L at x_k lam^tau and time t_j reads L at
    lam t_j; for a field of the path on [0, lam T] this is a field on [0, T].
    """
    if not lam > 0.0:
        raise ValidationError(f"Scale factor must be positive, got {lam}")
    tau = field.source_spec.tau
    metadata = dict(field.metadata)
    metadata["rescaled_by"] = lam
    bandwidth = field.bandwidth * lam ** (-tau)
    if field.estimator == EstimatorType.FOURIER:
        bandwidth = field.bandwidth * lam ** tau
    return LocalTimeField(
        x_grid=field.x_grid * lam ** (-tau),
        t_grid=field.t_grid / lam,
        values=field.values * lam ** (tau - 1.0),
        estimator=field.estimator,
        bandwidth=bandwidth,
        source_spec=field.source_spec.replace(horizon=field.source_spec.horizon / lam),
        value_range=(field.value_range[0] * lam ** (-tau), field.value_range[1] * lam ** (-tau)),
        metadata=metadata,
    )
