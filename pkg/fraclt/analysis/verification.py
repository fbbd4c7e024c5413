"""
Statistical verification of distributional identities and asymptotic laws.

Equalities in law are tested with the two-sample Kolmogorov-Smirnov test at
level 0.01 (exact distribution below 1000 samples, asymptotic above). A PASS
is Monte Carlo evidence, not proof; every report carries its p-value.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ..core.covariance import c_h_constant
from ..core.functions import TestFunction
from ..core.special import gamma
from ..core.types import (
    Decision,
    Interval,
    LilConstants,
    PathGrid,
    ProcessKind,
    RateFit,
    StatisticEnsemble,
    VerificationReport,
)
from ..estimators.field import default_level_grid, local_time_field, running_sup_stats, sup_diff_stats
from ..estimators.occupation import default_bandwidth, local_time_eps
from ..exceptions import DomainError, ValidationError
from .functionals import scaled_functional

logger = logging.getLogger(__name__)

KS_LEVEL = 0.01
EXACT_KS_LIMIT = 1000
MIN_ENSEMBLE = 1000
LIMIT_THRESHOLD = 0.05
LIL_SLACK = (0.2, 2.0)
LIL_INNER = (0.5, 1.3)
LIL_PAIRED_TOLERANCE = 0.10
GROWTH_TOLERANCE = 0.15

STATISTICS = ("L0", "Z", "K", "Y")


def lil_constants(tau: float, kind: str = ProcessKind.FBM) -> LilConstants:
    """
    Constants of limsup L(0,t) / (t^{1-tau} (loglog t)^tau) = c_tau theta(tau)^{-tau}.

    theta(tau) is only known to lie in [theta_lo, theta_hi]; the limsup
    therefore lies in [c_tau theta_hi^{-tau}, c_tau theta_lo^{-tau}]. Both
    ends coincide at tau = 1/2, where the bound is sqrt(2).

    Args:
        tau: Self-similarity index in (0, 1)
        kind: ProcessKind.FBM (c_tau = 1) or ProcessKind.RL (c_tau = delta_tau)

    Returns:
        LilConstants: All constants, with bracket_ordered flagging theta_lo <= theta_hi
    """
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (0, 1), got {tau}")
    if kind not in ProcessKind.ALL:
        raise ValidationError(f"Unknown process kind: {kind}")
    delta = c_h_constant(tau)
    theta0 = tau * ((1.0 - tau) ** (1.0 - tau) / gamma(1.0 - tau)) ** (1.0 / tau)
    theta_lo = (math.pi * delta ** 2 / tau) ** (1.0 / (2.0 * tau)) * theta0
    theta_hi = (2.0 * math.pi) ** (1.0 / (2.0 * tau)) * theta0
    c_tau = 1.0 if kind == ProcessKind.FBM else delta
    ordered = theta_lo <= theta_hi * (1.0 + 1e-12)
    if not ordered:
        logger.warning("theta bracket reversed at tau=%s: %.6g > %.6g", tau, theta_lo, theta_hi)
    return LilConstants(
        tau=tau,
        kind=kind,
        delta_tau=delta,
        theta0=theta0,
        theta_lo=theta_lo,
        theta_hi=theta_hi,
        c_tau=c_tau,
        limsup_lo=c_tau * theta_hi ** (-tau),
        limsup_hi=c_tau * theta_lo ** (-tau),
        bracket_ordered=ordered,
    )


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> Tuple[float, float]:
    """KS distance and p-value, exact below 1000 samples per side"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    method = "exact" if max(a.size, b.size) < EXACT_KS_LIMIT else "asymp"
    result = stats.ks_2samp(a, b, method=method)
    return float(result.statistic), float(result.pvalue)


def ks_report(
    name: str,
    a: np.ndarray,
    b: np.ndarray,
    level: float = KS_LEVEL,
    metadata: Optional[Dict] = None,
) -> VerificationReport:
    """PASS iff the two samples are not distinguished at the given level"""
    distance, p_value = ks_two_sample(a, b)
    decision = Decision.PASS if p_value >= level else Decision.FAIL
    return VerificationReport(
        name=name,
        statistic=distance,
        threshold=level,
        decision=decision,
        n_replicates=int(min(np.size(a), np.size(b))),
        p_value=p_value,
        metadata=dict(metadata or {}),
    )


def _check_ensembles(a: StatisticEnsemble, b: StatisticEnsemble, min_size: int) -> None:
    if a.tau != b.tau:
        raise ValidationError(f"Ensembles have different tau: {a.tau} vs {b.tau}")
    if min(len(a), len(b)) < min_size:
        raise ValidationError(f"Need at least {min_size} replicates per ensemble")


def statistic_ensemble(
    paths: Sequence[PathGrid],
    statistic: str,
    t: Optional[float] = None,
    nu: Optional[float] = None,
    x: float = 0.0,
    n_levels: int = 257,
    n_times: int = 32,
) -> StatisticEnsemble:
    """
    Evaluate one scalar statistic on every path.

    Args:
        paths: Replicate paths of one spec
        statistic: "L0" (L(x, t)), "Z", "K" (at time t) or "Y" (running sup up to t)
        t: Evaluation time (defaults to the horizon)
        nu: Holder order for Z and Y
        x: Level for L0
        n_levels: Levels of the field for Z, K, Y
        n_times: Grid times in (0, t] for the running sup of Y

    Returns:
        StatisticEnsemble: One value per path
    """
    if statistic not in STATISTICS:
        raise ValidationError(f"Unknown statistic {statistic}; expected one of {STATISTICS}")
    if not paths:
        raise ValidationError("Empty path ensemble")
    tau = paths[0].spec.tau
    t = paths[0].horizon if t is None else t
    if statistic in ("Z", "Y") and nu is None:
        raise ValidationError(f"Statistic {statistic} needs nu")
    values = []
    for path in paths:
        eps = default_bandwidth(path)
        if statistic == "L0":
            values.append(local_time_eps(path, x, t, eps))
            continue
        levels = default_level_grid(path, eps, n_levels)
        if statistic == "Y":
            end = path.index_of(t)
            steps = np.unique(np.linspace(0, end, n_times + 1).round().astype(int))
            field = local_time_field(path, levels, steps * path.dt, bandwidth=eps)
            values.append(float(running_sup_stats(field, nu)[0][-1]))
            continue
        field = local_time_field(path, levels, [t], bandwidth=eps)
        Z, K = sup_diff_stats(field, t, nu if nu is not None else 0.5 * _nu_upper(tau))
        values.append(Z if statistic == "Z" else K)
    return StatisticEnsemble(values=np.asarray(values), tau=tau, statistic=statistic, time=t)


def _nu_upper(tau: float) -> float:
    return (1.0 - tau) / (2.0 * tau)


def scaling_test(
    ensemble_a: StatisticEnsemble,
    ensemble_b: StatisticEnsemble,
    transform: Tuple[float, float],
    name: Optional[str] = None,
    min_replicates: int = MIN_ENSEMBLE,
) -> VerificationReport:
    """
    Test A =d lam^exponent * B by two-sample KS.

    Typical use: A = S(1) and B = S(lam) for a statistic S with
    S(1) =d lam^exponent S(lam): exponent tau - 1 for L(0, .) and K,
    -1 + tau (1 + gamma) for Y.

    Args:
        ensemble_a: Statistic at time 1
        ensemble_b: Statistic at time lam
        transform: (lam, exponent)
        name: Report name

    Returns:
        VerificationReport: PASS iff equality is not rejected at 0.01

    Raises:
        ValidationError: If the ensembles have different tau or are too small
    """
    _check_ensembles(ensemble_a, ensemble_b, min_replicates)
    lam, exponent = transform
    if not lam > 0.0:
        raise ValidationError(f"Scale factor must be positive, got {lam}")
    scaled = lam ** exponent * ensemble_b.values
    return ks_report(
        name or f"scaling.{ensemble_a.statistic}",
        ensemble_a.values,
        scaled,
        metadata={"lambda": lam, "exponent": exponent, "tau": ensemble_a.tau},
    )


def translation_test(
    ensemble_at_0: StatisticEnsemble,
    ensemble_at_z: StatisticEnsemble,
    nu: Optional[float] = None,
    name: Optional[str] = None,
    min_replicates: int = MIN_ENSEMBLE,
) -> VerificationReport:
    """
    Test that a statistic has the same law for paths started at 0 and at z.

    Holds for Z, Y and K; fails for L(0, .), which is the negative control.
    """
    _check_ensembles(ensemble_at_0, ensemble_at_z, min_replicates)
    return ks_report(
        name or f"translation.{ensemble_at_0.statistic}",
        ensemble_at_0.values,
        ensemble_at_z.values,
        metadata={"nu": nu, "tau": ensemble_at_0.tau, "statistic": ensemble_at_0.statistic},
    )


def first_order_limit_test(
    tau: float,
    f: TestFunction,
    lambda_ladder: Sequence[float],
    paths: Sequence[PathGrid],
    threshold: float = LIMIT_THRESHOLD,
    name: str = "first_order_limit",
) -> VerificationReport:
    """
    Convergence in law of lam^{tau-1} int_0^{lam t} f(X) ds to f_bar L(0, t).

    For each lam the KS distance between the scaled functional ensemble and
    the f_bar L(0, T) ensemble is computed on the same unit paths.

    Returns:
        VerificationReport: PASS iff the distances strictly decrease along the
        ladder and the last one is below the threshold
    """
    f.require_nonzero_mean()
    if not paths:
        raise ValidationError("Empty path ensemble")
    if any(abs(p.spec.tau - tau) > 1e-12 for p in paths):
        raise ValidationError("Paths do not match the requested tau")
    ladder = np.asarray(lambda_ladder, dtype=float)
    if ladder.size < 2 or np.any(np.diff(ladder) <= 0.0):
        raise ValidationError("The lambda ladder must be strictly increasing with at least two entries")
    limit = np.array([f.f_bar * local_time_eps(p, 0.0, p.horizon, default_bandwidth(p)) for p in paths])
    distances = []
    for lam in ladder:
        scaled = np.array([scaled_functional(p, f, lam) for p in paths])
        distances.append(ks_two_sample(scaled, limit)[0])
        logger.info("lambda=%g: KS distance %.4f", lam, distances[-1])
    decreasing = bool(np.all(np.diff(distances) < 0.0))
    final = distances[-1]
    decision = Decision.PASS if decreasing and final < threshold else Decision.FAIL
    return VerificationReport(
        name=name,
        statistic=final,
        threshold=threshold,
        decision=decision,
        n_replicates=len(paths),
        metadata={
            "lambdas": [float(v) for v in ladder],
            "distances": distances,
            "decreasing": decreasing,
            "tau": tau,
        },
    )


def lil_ratio(t_grid: np.ndarray, series: np.ndarray, tau: float) -> np.ndarray:
    """R(t) = series / (t^{1-tau} (loglog t)^tau); requires t > e"""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= math.e):
        raise ValidationError("loglog t is undefined or nonpositive for t <= e")
    normaliser = t_grid ** (1.0 - tau) * np.log(np.log(t_grid)) ** tau
    return np.asarray(series, dtype=float) / normaliser


def lil_envelope(
    t_grid: np.ndarray,
    series: np.ndarray,
    tau: float,
    window: Interval,
    quantile: float = 0.9,
) -> float:
    """
    Max over the window of the ensemble quantile of per-replicate running maxima of R(t).

    Args:
        t_grid: Times
        series: Replicates x times array of L(0, t) (or int_0^t f / f_bar)
        tau: Self-similarity index
        window: (t_lo, t_hi) with t_lo > e

    Returns:
        float: Envelope statistic
    """
    lo, hi = window
    if not (math.e < lo < hi):
        raise ValidationError(f"LIL window [{lo}, {hi}] must satisfy e < t_lo < t_hi")
    t_grid = np.asarray(t_grid, dtype=float)
    mask = (t_grid >= lo) & (t_grid <= hi)
    if np.count_nonzero(mask) < 2:
        raise ValidationError("LIL window holds fewer than two grid times")
    series = np.atleast_2d(np.asarray(series, dtype=float))
    ratio = lil_ratio(t_grid[mask], series[:, mask], tau)
    running = np.maximum.accumulate(ratio, axis=1)
    return float(np.quantile(running, quantile, axis=0).max())


def lil_band(constants: LilConstants) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """Inner (PASS) and outer (non-FAIL) bands around the limsup bracket"""
    lo = min(constants.limsup_lo, constants.limsup_hi)
    hi = max(constants.limsup_lo, constants.limsup_hi)
    if constants.kind == ProcessKind.RL:
        # unit-normalised RL representation: widen by delta^{+-1}
        spread = max(constants.delta_tau, 1.0 / constants.delta_tau)
        lo, hi = lo / spread, hi * spread
    inner = (LIL_INNER[0] * lo, LIL_INNER[1] * hi)
    outer = (LIL_SLACK[0] * lo, LIL_SLACK[1] * hi)
    return inner, outer


def lil_statistic(
    t_grid: np.ndarray,
    series: np.ndarray,
    tau: float,
    kind: str,
    window: Interval,
    name: str = "lil",
) -> VerificationReport:
    """
    Compare the LIL envelope of an ensemble with the constant bracket.

    PASS inside [0.5, 1.3] x bracket, FAIL outside [0.2, 2.0] x bracket,
    INCONCLUSIVE in between. loglog t is still about 2 at t = 10^4, so this
    catches exponent errors rather than constant-level ones.
    """
    constants = lil_constants(tau, kind)
    statistic = lil_envelope(t_grid, series, tau, window)
    inner, outer = lil_band(constants)
    if inner[0] <= statistic <= inner[1]:
        decision = Decision.PASS
    elif outer[0] <= statistic <= outer[1]:
        decision = Decision.INCONCLUSIVE
    else:
        decision = Decision.FAIL
    return VerificationReport(
        name=name,
        statistic=statistic,
        threshold=constants.limsup_hi,
        decision=decision,
        n_replicates=int(np.atleast_2d(series).shape[0]),
        metadata={
            "tau": tau,
            "kind": kind,
            "limsup_lo": constants.limsup_lo,
            "limsup_hi": constants.limsup_hi,
            "inner_band": inner,
            "outer_band": outer,
            "window": tuple(window),
        },
    )


def lil_paired_test(
    t_grid: np.ndarray,
    local_series: np.ndarray,
    functional_series: np.ndarray,
    tau: float,
    window: Interval,
    tolerance: float = LIL_PAIRED_TOLERANCE,
    name: str = "lil.paired",
) -> VerificationReport:
    """
    Envelope of int_0^t f / f_bar against that of L(0, t) on the same paths.

    PASS iff the relative difference is within the tolerance.
    """
    local = lil_envelope(t_grid, local_series, tau, window)
    functional = lil_envelope(t_grid, functional_series, tau, window)
    relative = abs(functional - local) / abs(local) if local != 0.0 else math.inf
    return VerificationReport(
        name=name,
        statistic=relative,
        threshold=tolerance,
        decision=Decision.PASS if relative <= tolerance else Decision.FAIL,
        n_replicates=int(np.atleast_2d(local_series).shape[0]),
        metadata={"local_envelope": local, "functional_envelope": functional, "tau": tau},
    )


def rate_report(
    name: str,
    fit: RateFit,
    bound: float,
    strict: bool = True,
) -> VerificationReport:
    """PASS iff the upper 95% bootstrap bound of the slope is below (or at) the bound"""
    passed = fit.ci_hi < bound if strict else fit.ci_hi <= bound
    return VerificationReport(
        name=name,
        statistic=fit.slope,
        threshold=bound,
        decision=Decision.PASS if passed else Decision.FAIL,
        n_replicates=fit.n_replicates,
        metadata={"ci_lo": fit.ci_lo, "ci_hi": fit.ci_hi, "window": fit.window},
    )


def strong_approximation_test(fit: RateFit, tau: float) -> VerificationReport:
    """Residual envelope grows slower than t^{1-tau} at 95% confidence"""
    return rate_report("strong_approximation", fit, 1.0 - tau)


def negative_control_rate(fit: RateFit, tau: float) -> VerificationReport:
    """For f_bar = 0 the functional itself grows slower than t^{1-tau}"""
    return rate_report("negative_control", fit, 1.0 - tau)


def sup_growth_test(
    name: str,
    fit: RateFit,
    exponent: float,
    tolerance: float = GROWTH_TOLERANCE,
) -> VerificationReport:
    """
    Sup-difference growth: Y(t) = o(t^{1-tau(1+nu)+eps}), K(t) = o(t^{1-tau+eps}).

    PASS iff the upper bootstrap bound is at most exponent * (1 + tolerance).
    """
    report = rate_report(name, fit, exponent * (1.0 + tolerance), strict=False)
    report.metadata["exponent"] = exponent
    return report


def self_similarity_test(
    values_at_t: np.ndarray,
    values_at_at: np.ndarray,
    a: float,
    tau: float,
    name: str = "self_similarity",
) -> VerificationReport:
    """X(aT) =d a^tau X(T), tested as X(T) =d a^{-tau} X(aT)"""
    return ks_report(
        name,
        np.asarray(values_at_t),
        a ** (-tau) * np.asarray(values_at_at),
        metadata={"a": a, "tau": tau},
    )


def stationary_increment_test(
    increments: np.ndarray,
    values: np.ndarray,
    name: str = "stationary_increments",
) -> VerificationReport:
    """B(t + s) - B(s) =d B(t) for fBm"""
    return ks_report(name, np.asarray(increments), np.asarray(values))


def variance_report(
    name: str,
    samples: np.ndarray,
    analytic: float,
    bound: float = 0.0,
) -> VerificationReport:
    """
    PASS iff |sample variance - analytic| <= 3 standard errors + bound.

    The standard error of the variance uses the sample fourth central moment.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    centred = samples - samples.mean()
    variance = float(np.mean(centred ** 2))
    fourth = float(np.mean(centred ** 4))
    standard_error = math.sqrt(max(fourth - variance ** 2, 0.0) / n)
    threshold = 3.0 * standard_error + bound
    gap = abs(variance - analytic)
    return VerificationReport(
        name=name,
        statistic=gap,
        threshold=threshold,
        decision=Decision.PASS if gap <= threshold else Decision.FAIL,
        n_replicates=n,
        metadata={"sample_variance": variance, "analytic_variance": analytic, "bound": bound},
    )
