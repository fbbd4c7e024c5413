"""
Registered verification checks.

Each check takes a CheckContext (resolved configuration plus the simulation
client) and returns one or more VerificationReports. Checks draw their
replicates from their own named seed streams, so running a subset of checks
reproduces the same numbers as running the full suite.

Negative controls and power checks are reported as PASS when the underlying
test rejects, so a run without FAIL is a successful run.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from ..core.client import SimulationClient
from ..core.covariance import PSD_TOLERANCE, build_covariance, c_h_constant, fbm_covariance, rl_covariance
from ..core.functions import TestFunction, TestFunctionRegistry
from ..core.types import (
    Decision,
    ExperimentConfig,
    FunctionId,
    PathGrid,
    ProcessKind,
    ProcessSpec,
    ReportList,
    SamplerType,
    StatisticEnsemble,
    VerificationReport,
)
from ..estimators.field import default_level_grid, local_time_field, running_sup_stats
from ..estimators.occupation import additivity_check, default_bandwidth, local_time_eps, translate_path
from ..estimators.regularity import bivariate_holder_exponents, time_holder_exponent
from ..exceptions import ConfigurationError
from ..samplers.kernel import kernel_variance_gap
from ..utils import derive_stream, is_power_of_two
from .functionals import (
    functional,
    functional_series,
    occupation_density_check,
    quantile_envelope_regression,
    rate_regression,
    residual_series,
)
from .verification import (
    first_order_limit_test,
    ks_report,
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
    variance_report,
)

logger = logging.getLogger(__name__)

DENSITY_TOLERANCE = 0.02
DENSITY_PATHS = 100
HOLDER_SLACK = 0.15
CONSTANT_TOLERANCE = 1e-10
CONTINUITY_STEP = 1e-3
CONTINUITY_TOLERANCE = 1e-2
SAMPLER_GRID = 256


@dataclass
class CheckContext:
    """Everything a check needs: the experiment and a client to sample with"""
    config: ExperimentConfig
    client: SimulationClient
    artifacts: Dict[str, Any] = field(default_factory=dict)

    @property
    def spec(self) -> ProcessSpec:
        return self.config.process

    @property
    def tau(self) -> float:
        return self.config.process.tau

    @property
    def settings(self):
        return self.config.verify

    def function(self) -> TestFunction:
        return self.config.make_function()

    def stream(self, label: str) -> int:
        return derive_stream(self.config.master_seed, label)

    def collect(
        self,
        spec: ProcessSpec,
        label: str,
        fn: Optional[Callable[[PathGrid], Any]] = None,
        replicates: Optional[int] = None,
    ) -> List[Any]:
        """Map fn over the replicates of a named stream"""
        count = self.config.replicates if replicates is None else replicates
        return self.client.collect(spec, count, self.stream(label), fn)

    def long_spec(self, horizon: float, n_steps: int) -> ProcessSpec:
        """
        The configured process on a longer horizon.

        Cholesky grids above the cap move to the FFT sampler of the process
        (circulant for fBm on power-of-two grids, kernel convolution for RL).
        """
        spec = self.spec.replace(horizon=horizon, n_steps=n_steps)
        if spec.sampler == SamplerType.CHOLESKY and n_steps > self.config.cholesky_cap:
            if spec.kind == ProcessKind.FBM and is_power_of_two(n_steps):
                spec = spec.replace(sampler=SamplerType.CIRCULANT)
            elif spec.kind == ProcessKind.RL:
                spec = spec.replace(sampler=SamplerType.KERNEL_CONV)
            logger.info("Using the %s sampler for %d steps", spec.sampler, n_steps)
        return spec


@dataclass(frozen=True)
class CheckMetadata:
    """Metadata for a registered check"""
    name: str
    description: Optional[str] = None


CheckFunction = Callable[[CheckContext], ReportList]


class CheckRegistry:
    """Registry of named verification checks"""

    _checks: Dict[str, CheckFunction] = {}
    _metadata: Dict[str, CheckMetadata] = {}

    @classmethod
    def register(cls, metadata: CheckMetadata, fn: CheckFunction) -> None:
        """Register a check"""
        cls._checks[metadata.name] = fn
        cls._metadata[metadata.name] = metadata

    @classmethod
    def get(cls, name: str) -> CheckFunction:
        """Get a check by name"""
        if name not in cls._checks:
            raise ConfigurationError(f"Check not found: {name}")
        return cls._checks[name]

    @classmethod
    def describe(cls, name: str) -> CheckMetadata:
        cls.get(name)
        return cls._metadata[name]

    @classmethod
    def list(cls) -> List[str]:
        """List all registered checks in registration order"""
        return list(cls._checks.keys())

    @classmethod
    def run(cls, name: str, context: CheckContext) -> ReportList:
        """Run one check and log its decisions"""
        fn = cls.get(name)
        logger.info("Running check %s", name)
        reports = fn(context)
        for report in reports:
            logger.info("%s: %s (statistic %.6g, threshold %.6g)",
                        report.name, report.decision, report.statistic, report.threshold)
        return reports


# Decorator for registering checks
def check(name: str, description: Optional[str] = None):
    """Decorator for registering verification checks"""
    def decorator(fn: CheckFunction) -> CheckFunction:
        CheckRegistry.register(CheckMetadata(name=name, description=description), fn)
        return fn
    return decorator


def expect_rejection(report: VerificationReport, name: str) -> VerificationReport:
    """Invert the decision of a test that is supposed to reject"""
    metadata = dict(report.metadata)
    metadata.update({"control": True, "underlying_decision": report.decision})
    return VerificationReport(
        name=name,
        statistic=report.statistic,
        threshold=report.threshold,
        decision=Decision.PASS if report.decision == Decision.FAIL else Decision.FAIL,
        n_replicates=report.n_replicates,
        p_value=report.p_value,
        metadata=metadata,
    )


def _exact_report(name: str, statistic: float, threshold: float, passed: bool, **metadata: Any) -> VerificationReport:
    return VerificationReport(
        name=name,
        statistic=float(statistic),
        threshold=float(threshold),
        decision=Decision.PASS if passed else Decision.FAIL,
        n_replicates=0,
        metadata=metadata,
    )


def time_grid(spec: ProcessSpec, n_times: int) -> np.ndarray:
    """About n_times log-spaced grid times in [dt, T], snapped up to the grid"""
    targets = np.geomspace(spec.dt, spec.horizon, n_times)
    indices = np.ceil(targets / spec.dt - 1e-9).astype(int)
    indices = np.unique(np.clip(indices, 1, spec.n_steps))
    return indices * spec.dt


def fine_level_grid(path: PathGrid, eps: float, n_levels: int) -> np.ndarray:
    """Default level grid, refined until the spacing is at most eps / 2"""
    span = path.values.max() - path.values.min() + 2.0 * eps
    needed = int(math.ceil(span / (0.5 * eps))) + 1
    return default_level_grid(path, eps, max(n_levels, needed))


def _path_statistics(
    path: PathGrid,
    names: Sequence[str],
    nu: float,
    n_levels: int,
) -> List[float]:
    return [float(statistic_ensemble([path], name, nu=nu, n_levels=n_levels).values[0]) for name in names]


def _ensembles(
    rows: List[List[float]],
    names: Sequence[str],
    tau: float,
    time: float,
) -> Dict[str, StatisticEnsemble]:
    table = np.asarray(rows, dtype=float)
    return {
        name: StatisticEnsemble(values=table[:, k], tau=tau, statistic=name, time=time)
        for k, name in enumerate(names)
    }


@check("constants", "LIL constants at tau = 1/2, bracket ordering and continuity")
def check_constants(context: CheckContext) -> ReportList:
    kind = context.spec.kind
    half = lil_constants(0.5, kind)
    root2 = math.sqrt(2.0)
    errors = [
        abs(half.delta_tau - 1.0),
        abs(half.theta0 * 4.0 * math.pi - 1.0),
        abs(half.theta_lo - 0.5) * 2.0,
        abs(half.theta_hi - 0.5) * 2.0,
        abs(half.limsup_lo - root2) / root2,
        abs(half.limsup_hi - root2) / root2,
    ]
    reports = [
        _exact_report("constants.brownian", max(errors), CONSTANT_TOLERANCE,
                      max(errors) <= CONSTANT_TOLERANCE, kind=kind),
    ]

    sweep = [round(0.1 * k, 10) for k in range(1, 10)]
    violations = [tau for tau in sweep if not lil_constants(tau, kind).bracket_ordered]
    reports.append(VerificationReport(
        name="constants.bracket",
        statistic=float(len(violations)),
        threshold=0.0,
        decision=Decision.PASS if not violations else Decision.INCONCLUSIVE,
        n_replicates=0,
        metadata={"violations": violations},
    ))

    c_values = [c_h_constant(tau) for tau in sweep]
    positive = all(math.isfinite(v) and v > 0.0 for v in c_values)
    reports.append(_exact_report(
        "constants.c_h", abs(c_h_constant(0.5) - 1.0), CONSTANT_TOLERANCE,
        positive and abs(c_h_constant(0.5) - 1.0) <= CONSTANT_TOLERANCE, positive=positive,
    ))

    taus = np.arange(0.1, 0.9 + 0.5 * CONTINUITY_STEP, CONTINUITY_STEP)
    table = np.array([[c.limsup_lo, c.limsup_hi, c.theta0] for c in (lil_constants(t, kind) for t in taus)])
    jump = float(np.abs(np.diff(table, axis=0)).max())
    reports.append(_exact_report("constants.continuity", jump, CONTINUITY_TOLERANCE, jump < CONTINUITY_TOLERANCE))
    return reports


@check("covariance", "Terminal variance against the analytic covariance")
def check_covariance(context: CheckContext) -> ReportList:
    spec = context.spec
    T = spec.horizon
    finals = context.collect(spec, "covariance", lambda p: float(p.values[-1]))
    if spec.kind == ProcessKind.FBM:
        analytic = float(fbm_covariance(T, T, spec.tau))
    else:
        analytic = rl_covariance(T, T, spec.tau)
    bound = 0.0
    if spec.sampler == SamplerType.KERNEL_CONV:
        bound = kernel_variance_gap(spec)
    reports = [variance_report("covariance.variance", np.asarray(finals), analytic, bound)]

    small = spec.replace(n_steps=min(spec.n_steps, SAMPLER_GRID), sampler=SamplerType.CHOLESKY)
    matrix = build_covariance(small)
    largest = float(linalg.eigh(matrix.entries, eigvals_only=True)[-1])
    floor = -PSD_TOLERANCE * largest
    reports.append(_exact_report(
        "covariance.psd", matrix.min_eigenvalue, floor, matrix.min_eigenvalue >= floor,
        clipped=matrix.clipped, n_steps=small.n_steps,
    ))
    if spec.tau == 0.5:
        gap = abs(float(fbm_covariance(T, T, 0.5)) - rl_covariance(T, T, 0.5))
        reports.append(_exact_report("covariance.brownian_reduction", gap, 1e-12, gap <= 1e-12))
    return reports


@check("samplers", "Cross-sampler marginals, self-similarity and stationary increments")
def check_samplers(context: CheckContext) -> ReportList:
    spec = context.spec
    n = 1 << int(math.floor(math.log2(min(spec.n_steps, context.config.cholesky_cap))))
    reference = spec.replace(n_steps=n, sampler=SamplerType.CHOLESKY)
    alternative = reference.replace(
        sampler=SamplerType.CIRCULANT if spec.kind == ProcessKind.FBM else SamplerType.KERNEL_CONV
    )
    indices = [n // 4, n // 2, n]
    a = np.asarray(context.collect(reference, "samplers.reference", lambda p: p.values[indices]))
    b = np.asarray(context.collect(alternative, "samplers.alternative", lambda p: p.values[indices]))
    reports = [
        ks_report(f"samplers.{alternative.sampler}.{label}", a[:, k], b[:, k], metadata={"n_steps": n})
        for k, label in enumerate(("quarter", "half", "end"))
    ]

    for scale in (2.0, 4.0):
        stretched = reference.replace(horizon=reference.horizon * scale)
        ends = np.asarray(context.collect(stretched, f"samplers.scale{scale:g}", lambda p: float(p.values[-1])))
        reports.append(self_similarity_test(a[:, 2], ends, scale, spec.tau, name=f"samplers.self_similarity.a{scale:g}"))

    if spec.kind == ProcessKind.FBM and a.shape[0] >= 2:
        # disjoint replicates keep the two samples independent
        increments = a[0::2, 2] - a[0::2, 1]
        reports.append(stationary_increment_test(increments, a[1::2, 1], name="samplers.stationary_increments"))
    return reports


@check("occupation_density", "Time integral of f(X) against the level integral of f L")
def check_occupation_density(context: CheckContext) -> ReportList:
    f = context.function()
    n_levels = context.settings.n_levels

    def relative_error(path: PathGrid) -> float:
        eps = default_bandwidth(path)
        levels = fine_level_grid(path, eps, n_levels)
        field = local_time_field(path, levels, [path.horizon], bandwidth=eps)
        return occupation_density_check(path, f, field, path.horizon)[2]

    count = min(context.config.replicates, DENSITY_PATHS)
    errors = np.asarray(context.collect(context.spec, "occupation_density", relative_error, count))
    mean = float(errors.mean())
    return [VerificationReport(
        name="occupation_density",
        statistic=mean,
        threshold=DENSITY_TOLERANCE,
        decision=Decision.PASS if mean <= DENSITY_TOLERANCE else Decision.FAIL,
        n_replicates=count,
        metadata={"max": float(errors.max()), "function": f.function_id},
    )]


@check("additivity", "L(0,t) = L(0,s) + L(0,t-s) on the shifted path, for s in {0, t/4, t/2, t}")
def check_additivity(context: CheckContext) -> ReportList:
    def worst_gap(path: PathGrid) -> float:
        eps = default_bandwidth(path)
        T = path.horizon
        gaps = []
        for s in (0.0, 0.25 * T, 0.5 * T, T):
            lhs, rhs = additivity_check(path, 0.0, s, T, eps)
            gaps.append(abs(lhs - rhs))
        return max(gaps)

    spec = context.spec
    gaps = np.asarray(context.collect(spec, "additivity", worst_gap))
    bound = spec.dt / (2.0 * spec.dt ** spec.tau)
    worst = float(gaps.max())
    return [VerificationReport(
        name="additivity",
        statistic=worst,
        threshold=bound,
        decision=Decision.PASS if worst <= bound else Decision.FAIL,
        n_replicates=int(gaps.size),
    )]


@check("scaling", "Scaling laws of L(0,.), K and Y, with perturbed-exponent power checks")
def check_scaling(context: CheckContext) -> ReportList:
    tau = context.tau
    nu = context.settings.nu_for(tau)
    exponents = {"L0": tau - 1.0, "K": tau - 1.0, "Y": -1.0 + tau * (1.0 + nu)}
    names = tuple(exponents)
    n_levels = context.settings.n_levels
    minimum = context.settings.min_ensemble

    def statistics(path: PathGrid) -> List[float]:
        return _path_statistics(path, names, nu, n_levels)

    unit = context.spec.replace(horizon=1.0)
    base = _ensembles(context.collect(unit, "scaling.unit", statistics), names, tau, 1.0)
    reports = []
    for lam in context.settings.scale_lambdas:
        scaled_spec = unit.replace(horizon=lam)
        scaled = _ensembles(context.collect(scaled_spec, f"scaling.lambda{lam:g}", statistics), names, tau, lam)
        for name, exponent in exponents.items():
            label = f"scaling.{name}.lambda{lam:g}"
            reports.append(scaling_test(base[name], scaled[name], (lam, exponent), name=label,
                                        min_replicates=minimum))
            wrong = scaling_test(base[name], scaled[name], (lam, exponent + 1.0), name=label,
                                 min_replicates=minimum)
            reports.append(expect_rejection(wrong, f"{label}.power"))
    return reports


@check("translation", "Translation invariance of Z, Y, K; L(0,.) as negative control")
def check_translation(context: CheckContext) -> ReportList:
    tau = context.tau
    nu = context.settings.nu_for(tau)
    z = context.settings.translation_offset
    names = ("Z", "Y", "K", "L0")
    n_levels = context.settings.n_levels
    minimum = context.settings.min_ensemble
    unit = context.spec.replace(horizon=1.0)

    def at_origin(path: PathGrid) -> List[float]:
        return _path_statistics(path, names, nu, n_levels)

    def shifted(path: PathGrid) -> List[float]:
        return _path_statistics(translate_path(path, z), names, nu, n_levels)

    origin = _ensembles(context.collect(unit, "translation.origin", at_origin), names, tau, 1.0)
    moved = _ensembles(context.collect(unit, "translation.shifted", shifted), names, tau, 1.0)
    reports = [
        translation_test(origin[name], moved[name], nu, name=f"translation.{name}", min_replicates=minimum)
        for name in ("Z", "Y", "K")
    ]
    control = translation_test(origin["L0"], moved["L0"], nu, name="translation.L0", min_replicates=minimum)
    reports.append(expect_rejection(control, "translation.L0.control"))
    for report in reports:
        report.metadata["z"] = z
    return reports


@check("first_order_limit", "Convergence of the scaled functional to f_bar L(0,1) along the lambda ladder")
def check_first_order_limit(context: CheckContext) -> ReportList:
    f = context.settings.make_limit_function()
    f.require_nonzero_mean()
    unit = context.spec.replace(horizon=1.0)
    paths = context.collect(unit, "first_order_limit")
    return [first_order_limit_test(context.tau, f, context.config.lambda_ladder, paths)]


@check("strong_approximation", "Growth exponent of the residual J(t) against 1 - tau")
def check_strong_approximation(context: CheckContext) -> ReportList:
    settings = context.settings
    f = context.function()
    f.require_nonzero_mean()
    spec = context.long_spec(settings.rate_horizon, settings.rate_steps)
    t_grid = time_grid(spec, settings.n_times)
    series = context.collect(spec, "strong_approximation", lambda p: residual_series(p, f, t_grid))
    context.artifacts["residuals"] = series
    fit = rate_regression(
        series, settings.rate_window, n_boot=settings.n_boot,
        seed=context.stream("strong_approximation.bootstrap"),
        min_replicates=settings.min_rate_replicates,
    )
    return [strong_approximation_test(fit, context.tau)]


@check("negative_control", "A mean-zero functional grows slower than t^(1 - tau)")
def check_negative_control(context: CheckContext) -> ReportList:
    settings = context.settings
    g = TestFunctionRegistry.create(FunctionId.SIGNED_DIFFERENCE)
    spec = context.long_spec(settings.rate_horizon, settings.rate_steps)
    t_grid = time_grid(spec, settings.n_times)
    samples = context.collect(spec, "negative_control", lambda p: functional_series(p, g, t_grid).J)
    fit = quantile_envelope_regression(
        t_grid, np.vstack(samples), settings.rate_window, n_boot=settings.n_boot,
        seed=context.stream("negative_control.bootstrap"),
        min_replicates=settings.min_rate_replicates,
    )
    return [negative_control_rate(fit, context.tau)]


@check("lil", "LIL envelopes of L(0,t), of int f / f_bar and of sup_x L(x,t)")
def check_lil(context: CheckContext) -> ReportList:
    settings = context.settings
    f = context.function()
    f.require_nonzero_mean()
    f_bar = f.f_bar
    spec = context.long_spec(settings.lil_horizon, settings.lil_steps)
    t_grid = time_grid(spec, settings.n_times)

    def series(path: PathGrid):
        eps = default_bandwidth(path)
        local = [local_time_eps(path, 0.0, t, eps) for t in t_grid]
        scaled = [functional(path, f, t) / f_bar for t in t_grid]
        levels = default_level_grid(path, eps, settings.n_levels)
        field = local_time_field(path, levels, t_grid, bandwidth=eps)
        return local, scaled, field.values.max(axis=0)

    rows = context.collect(spec, "lil", series)
    local = np.array([row[0] for row in rows])
    scaled = np.array([row[1] for row in rows])
    sup = np.array([row[2] for row in rows])
    window = settings.lil_window
    kind = spec.kind
    return [
        lil_statistic(t_grid, local, context.tau, kind, window, name="lil"),
        lil_paired_test(t_grid, local, scaled, context.tau, window, name="lil.paired"),
        lil_statistic(t_grid, sup, context.tau, kind, window, name="lil.sup"),
    ]


@check("sup_growth", "Growth exponents of the running sup statistics Y and K")
def check_sup_growth(context: CheckContext) -> ReportList:
    settings = context.settings
    tau = context.tau
    nu = settings.nu_for(tau)
    spec = context.long_spec(settings.rate_horizon, settings.rate_steps)
    t_grid = time_grid(spec, settings.n_times)

    def running(path: PathGrid):
        eps = default_bandwidth(path)
        levels = default_level_grid(path, eps, settings.n_levels)
        field = local_time_field(path, levels, t_grid, bandwidth=eps)
        return running_sup_stats(field, nu)

    rows = context.collect(spec, "sup_growth", running)
    reports = []
    for k, (name, exponent) in enumerate((("Y", 1.0 - tau * (1.0 + nu)), ("K", 1.0 - tau))):
        samples = np.vstack([row[k] for row in rows])
        fit = quantile_envelope_regression(
            t_grid, samples, settings.rate_window, n_boot=settings.n_boot,
            seed=context.stream(f"sup_growth.{name}.bootstrap"),
            min_replicates=settings.min_rate_replicates,
        )
        reports.append(sup_growth_test(f"sup_growth.{name}", fit, exponent))
    return reports


@check("holder", "Holder exponents of the local time in time and jointly in level and time")
def check_holder(context: CheckContext) -> ReportList:
    spec = context.spec
    tau = context.tau
    nu = context.settings.nu_for(tau)
    paths = context.collect(spec, "holder")
    T = spec.horizon
    t0 = 0.5 * T
    lags = [T * 2.0 ** -k for k in range(2, 9) if T * 2.0 ** -k >= 4.0 * spec.dt]
    if len(lags) < 2:
        raise ConfigurationError("The holder check needs n_steps >= 64")
    time_fit = time_holder_exponent(paths, t0, lags)
    threshold = (1.0 - tau) * (1.0 - HOLDER_SLACK)
    slope = time_fit.slopes[0]
    reports = [VerificationReport(
        name="holder.time",
        statistic=slope,
        threshold=threshold,
        decision=Decision.PASS if slope >= threshold else Decision.FAIL,
        n_replicates=time_fit.n_replicates,
        metadata={"expected": time_fit.expected[0]},
    )]

    eps = default_bandwidth(paths[0])
    offsets = [eps * 2.0 ** k for k in range(1, 5)]
    joint = bivariate_holder_exponents(paths, t0, lags, offsets, nu)
    deviation = max(abs(s - e) / abs(e) for s, e in zip(joint.slopes, joint.expected))
    reports.append(VerificationReport(
        name="holder.joint",
        statistic=deviation,
        threshold=HOLDER_SLACK,
        decision=Decision.PASS if deviation <= HOLDER_SLACK else Decision.INCONCLUSIVE,
        n_replicates=joint.n_replicates,
        metadata={"slopes": joint.slopes, "expected": joint.expected, "nu": nu},
    ))
    return reports
