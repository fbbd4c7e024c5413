"""
Fourier-inversion local time estimator.

L(x, t) = (1/2pi) int (int_0^t exp(iu(X(s) - x)) ds) du, truncated to |u| <= U
on a uniform frequency grid and tapered with the Fejer weight 1 - |u|/U. The
tapered sum is a nonnegative kernel smoother, so negative values only come
from rounding; they are clipped to zero and counted.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..core.types import PathGrid
from ..exceptions import ValidationError
from .occupation import time_weights

logger = logging.getLogger(__name__)

MIN_FREQUENCIES = 16
DEFAULT_FREQUENCIES = 4096
_CHUNK_ELEMENTS = 1 << 22


def frequency_grid(cutoff: float, n_freq: int, taper: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Uniform frequencies on [-U, U] and their quadrature weights du * taper / 2pi.

    Raises:
        ValidationError: If U <= 0 or n_freq < 16
    """
    if not cutoff > 0.0:
        raise ValidationError(f"Frequency cutoff must be positive, got {cutoff}")
    if n_freq < MIN_FREQUENCIES:
        raise ValidationError(f"Need at least {MIN_FREQUENCIES} frequencies, got {n_freq}")
    u = np.linspace(-cutoff, cutoff, n_freq)
    du = 2.0 * cutoff / (n_freq - 1)
    weights = np.full(n_freq, du / (2.0 * math.pi))
    if taper:
        weights *= 1.0 - np.abs(u) / cutoff
    return u, weights


def default_cutoff(eps: float) -> float:
    """Nyquist-matched cutoff U = pi / eps"""
    return math.pi / eps


def fourier_sum(
    values: np.ndarray,
    time_weight: np.ndarray,
    levels: np.ndarray,
    u: np.ndarray,
    u_weight: np.ndarray,
) -> np.ndarray:
    """
    sum_k u_weight_k sum_i time_weight_i cos(u_k (values_i - x)) for every level x.

    Args:
        values: Path values X_i
        time_weight: Time quadrature weights, same length as values
        levels: Levels x
        u: Frequencies
        u_weight: Frequency weights

    Returns:
        np.ndarray: One raw (unclipped) estimate per level
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    result = np.zeros(levels.size)
    chunk = max(1, _CHUNK_ELEMENTS // max(values.size, 1))
    for start in range(0, u.size, chunk):
        u_chunk = u[start:start + chunk]
        phase = np.outer(u_chunk, values)
        # characteristic function of the occupation measure at each frequency
        real = np.cos(phase) @ time_weight
        imag = np.sin(phase) @ time_weight
        level_phase = np.outer(u_chunk, levels)
        contribution = real[:, None] * np.cos(level_phase) + imag[:, None] * np.sin(level_phase)
        result += u_weight[start:start + chunk] @ contribution
    return result


def local_time_fourier(
    path: PathGrid,
    x: float,
    t: float,
    cutoff: float,
    n_freq: int = DEFAULT_FREQUENCIES,
    taper: bool = True,
) -> float:
    """
    Truncated Fourier-inversion estimate of L(x, t).

    Args:
        path: Sampled path
        x: Level
        t: Time, <= T
        cutoff: Frequency cutoff U > 0
        n_freq: Number of frequencies on [-U, U], >= 16
        taper: Apply the Fejer taper

    Returns:
        float: Estimate, clipped at 0
    """
    u, u_weight = frequency_grid(cutoff, n_freq, taper)
    i0, weights = time_weights(path, (0.0, t))
    if weights.size == 0:
        return 0.0
    segment = path.values[i0:i0 + weights.size]
    raw = float(fourier_sum(segment, weights, np.array([x]), u, u_weight)[0])
    if raw < 0.0:
        logger.debug("Clipping negative Fourier estimate %.3e at x=%s, t=%s", raw, x, t)
        return 0.0
    return raw
