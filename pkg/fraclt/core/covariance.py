"""
Analytic covariances of fractional Brownian motion and the
Riemann-Liouville process, and their assembly on a sampling grid.
"""

import logging
import math
from typing import Union

import numpy as np
from scipy import integrate, linalg, special

from ..exceptions import DomainError, NumericalError
from .special import beta as beta_function
from .types import CovarianceMatrix, ProcessKind, ProcessSpec

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-10

Number = Union[float, np.ndarray]


def _check_hurst(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise DomainError(f"Hurst index must lie in (0, 1), got {H}")


def _check_times(*times: Number) -> None:
    for t in times:
        if np.any(np.asarray(t) < 0.0):
            raise DomainError("Times must be non-negative")


def fbm_covariance(t: Number, s: Number, H: float) -> Number:
    """
    Covariance of fractional Brownian motion.

    R(t, s) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2. Broadcasts over arrays.

    Args:
        t: First time(s), >= 0
        s: Second time(s), >= 0
        H: Hurst index in (0, 1)

    Returns:
        Covariance value(s)

    Raises:
        DomainError: If H is outside (0, 1) or a time is negative
    """
    _check_hurst(H)
    _check_times(t, s)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    two_h = 2.0 * H
    value = 0.5 * (t ** two_h + s ** two_h - np.abs(t - s) ** two_h)
    return float(value) if value.ndim == 0 else value


def rl_covariance(t: float, s: float, beta: float) -> float:
    """
    Covariance of the Riemann-Liouville process W(t) = int_0^t (t-u)^{beta-1/2} dW(u).

    Uses the closed form t^{2 beta} / (2 beta) on the diagonal and adaptive
    quadrature with an algebraic endpoint weight off the diagonal, so the
    kernel singularity for beta < 1/2 is integrated exactly.

    Args:
        t: First time, >= 0
        s: Second time, >= 0
        beta: Index, > 0

    Returns:
        float: int_0^{min(s,t)} (t-u)^{beta-1/2} (s-u)^{beta-1/2} du
    """
    if not beta > 0.0:
        raise DomainError(f"Riemann-Liouville index must be positive, got {beta}")
    _check_times(t, s)
    lo, hi = (float(s), float(t)) if s <= t else (float(t), float(s))
    if lo == 0.0:
        return 0.0
    exponent = beta - 0.5
    if lo == hi:
        return hi ** (2.0 * beta) / (2.0 * beta)
    # weight 'alg' integrates g(u) * (u - 0)^0 * (lo - u)^exponent over [0, lo]
    value, error = integrate.quad(
        lambda u: (hi - u) ** exponent,
        0.0,
        lo,
        weight="alg",
        wvar=(0.0, exponent),
        epsabs=1e-13,
        epsrel=1e-11,
        limit=200,
    )
    if not math.isfinite(value):
        raise NumericalError(f"RL covariance quadrature failed at ({t}, {s}, {beta})")
    return float(value)


def rl_covariance_grid(times: np.ndarray, beta: float) -> np.ndarray:
    """
    RL covariance on all pairs of a time grid.

    Uses the Euler integral form
    s^{beta+1/2} t^{beta-1/2} / (beta+1/2) * 2F1(1/2-beta, 1; beta+3/2; s/t), s < t,
    which agrees with the quadrature of rl_covariance.
    """
    if not beta > 0.0:
        raise DomainError(f"Riemann-Liouville index must be positive, got {beta}")
    times = np.asarray(times, dtype=float)
    _check_times(times)
    a = beta - 0.5
    hi = np.maximum(times[:, None], times[None, :])
    lo = np.minimum(times[:, None], times[None, :])
    entries = np.zeros_like(hi)
    off = (lo > 0.0) & (lo < hi)
    ratio = lo[off] / hi[off]
    entries[off] = (
        lo[off] ** (a + 1.0) * hi[off] ** a / (a + 1.0) * special.hyp2f1(-a, 1.0, a + 2.0, ratio)
    )
    diagonal = (lo > 0.0) & (lo == hi)
    entries[diagonal] = hi[diagonal] ** (2.0 * beta) / (2.0 * beta)
    return entries


def c_h_constant(H: float) -> float:
    """
    Normalising constant of the moving-average representation of fBm.

    c_H = sqrt(2H) 2^H B(1 - H, H + 1/2)^{-1/2}; equals 1 at H = 1/2.
    """
    _check_hurst(H)
    return math.sqrt(2.0 * H) * 2.0 ** H * beta_function(1.0 - H, H + 0.5) ** -0.5


def fgn_autocovariance(lags: np.ndarray, H: float, dt: float) -> np.ndarray:
    """Autocovariance of fBm increments over steps of length dt at integer lags"""
    _check_hurst(H)
    k = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * H
    return 0.5 * dt ** two_h * (np.abs(k + 1.0) ** two_h - 2.0 * k ** two_h + np.abs(k - 1.0) ** two_h)


def build_covariance(spec: ProcessSpec, tol: float = PSD_TOLERANCE) -> CovarianceMatrix:
    """
    Assemble the covariance of the process on its grid times, t = 0 included.

    Eigenvalues in [-tol * lambda_max, 0) are clipped to 0. Anything more
    negative is treated as a broken matrix.

    Args:
        spec: Process and grid description
        tol: Relative tolerance of the PSD repair

    Returns:
        CovarianceMatrix: (n_steps+1) x (n_steps+1) symmetric PSD matrix

    Raises:
        NumericalError: If an eigenvalue lies below -tol * lambda_max
    """
    times = spec.times()
    if spec.kind == ProcessKind.FBM:
        entries = fbm_covariance(times[:, None], times[None, :], spec.tau)
    else:
        entries = rl_covariance_grid(times, spec.tau)
    entries = 0.5 * (entries + entries.T)

    eigenvalues, eigenvectors = linalg.eigh(entries)
    lambda_max = float(eigenvalues[-1])
    lambda_min = float(eigenvalues[0])
    floor = -tol * max(lambda_max, 0.0)
    if lambda_min < floor:
        raise NumericalError(
            f"Covariance is not PSD: eigenvalue {lambda_min:.3e} below {floor:.3e} for {spec}"
        )
    negative = eigenvalues < 0.0
    clipped = int(np.count_nonzero(negative))
    if clipped:
        logger.debug("Clipping %d slightly negative eigenvalues (min %.3e)", clipped, lambda_min)
        repaired = np.where(negative, 0.0, eigenvalues)
        entries = (eigenvectors * repaired) @ eigenvectors.T
        entries = 0.5 * (entries + entries.T)

    return CovarianceMatrix(
        entries=entries,
        times=times,
        min_eigenvalue=lambda_min,
        clipped=clipped,
    )
