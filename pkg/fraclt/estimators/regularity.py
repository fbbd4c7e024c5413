"""
Holder exponent regressions for the local time.

Only exponents are checked: the moment bounds hold with unknown constants,
so the log-moment is regressed on the log-increment and the slope compared
against the exponent.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from ..core.types import PathGrid
from ..exceptions import ValidationError
from .occupation import default_bandwidth, local_time_eps

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HolderFit:
    """Fitted exponents of a log-moment regression"""
    slopes: tuple
    expected: tuple
    intercept: float
    n_replicates: int


def _moment(samples: np.ndarray) -> float:
    return float(np.sqrt(np.mean(samples ** 2)))


def time_holder_exponent(
    paths: Sequence[PathGrid],
    t0: float,
    lags: Sequence[float],
    x: float = 0.0,
    eps: Optional[float] = None,
) -> HolderFit:
    """
    Regress log ||L(x, t0 + h) - L(x, t0)||_2 on log h.

    The moment bound gives exponent 1 - tau.

    Args:
        paths: Replicate paths of one spec
        t0: Base time
        lags: Time lags h, t0 + h on the grid
        x: Level
        eps: Occupation bandwidth (defaults to dt^tau)

    Returns:
        HolderFit: One slope and its expected value
    """
    if len(paths) < 2 or len(lags) < 2:
        raise ValidationError("Need at least two paths and two lags")
    tau = paths[0].spec.tau
    eps = eps or default_bandwidth(paths[0])
    moments = []
    for h in lags:
        differences = np.array([
            local_time_eps(p, x, t0 + h, eps) - local_time_eps(p, x, t0, eps) for p in paths
        ])
        moments.append(_moment(differences))
    moments = np.asarray(moments)
    if np.any(moments <= 0.0):
        raise ValidationError("A local time increment moment vanished; lags are too small")
    fit = stats.linregress(np.log(lags), np.log(moments))
    logger.debug("Time Holder slope %.4f (expected %.4f)", fit.slope, 1.0 - tau)
    return HolderFit(
        slopes=(float(fit.slope),),
        expected=(1.0 - tau,),
        intercept=float(fit.intercept),
        n_replicates=len(paths),
    )


def bivariate_holder_exponents(
    paths: Sequence[PathGrid],
    t0: float,
    lags: Sequence[float],
    offsets: Sequence[float],
    nu: float,
    x: float = 0.0,
    eps: Optional[float] = None,
) -> HolderFit:
    """
    Two-way regression of the mixed increment moment.

    D = L(y, t) - L(y, s) - L(x, t) + L(x, s) with y = x + delta, t = s + h;
    log ||D||_2 is regressed on (log delta, log h). The bound has exponents
    (nu, 1 - tau (1 + nu)).

    Returns:
        HolderFit: Slopes (level, time) and their expected values
    """
    if len(paths) < 2 or len(lags) < 2 or len(offsets) < 2:
        raise ValidationError("Need at least two paths, two lags and two offsets")
    tau = paths[0].spec.tau
    eps = eps or default_bandwidth(paths[0])
    rows = []
    responses = []
    for delta in offsets:
        for h in lags:
            differences = np.array([
                local_time_eps(p, x + delta, t0 + h, eps)
                - local_time_eps(p, x + delta, t0, eps)
                - local_time_eps(p, x, t0 + h, eps)
                + local_time_eps(p, x, t0, eps)
                for p in paths
            ])
            moment = _moment(differences)
            if moment <= 0.0:
                continue
            rows.append((1.0, np.log(delta), np.log(h)))
            responses.append(np.log(moment))
    if len(rows) < 3:
        raise ValidationError("Too few nonzero mixed increments for a two-way regression")
    coefficients, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(responses), rcond=None)
    return HolderFit(
        slopes=(float(coefficients[1]), float(coefficients[2])),
        expected=(nu, 1.0 - tau * (1.0 + nu)),
        intercept=float(coefficients[0]),
        n_replicates=len(paths),
    )
