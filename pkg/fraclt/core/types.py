"""
Type definitions used throughout the fraclt package.
This module defines the value types that flow between the samplers, the
local time estimators, the functional analysis and the verification layer,
together with the string constants that name processes, samplers,
estimators and test decisions.
"""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple, Union

import numpy as np
from typing_extensions import TypedDict

from ..exceptions import DomainError, ValidationError

if TYPE_CHECKING:
    from .functions import TestFunction


# Enums as string literals (for config files and CSV output)
class ProcessKind:
    """Supported Gaussian processes"""
    FBM = "fbm"
    RL = "rl"

    ALL = (FBM, RL)

class SamplerType:
    """Supported path samplers"""
    CHOLESKY = "cholesky"
    CIRCULANT = "circulant"
    KERNEL_CONV = "kernel_conv"

    ALL = (CHOLESKY, CIRCULANT, KERNEL_CONV)

class EstimatorType:
    """Local time estimators"""
    EPS_OCCUPATION = "eps_occupation"
    FOURIER = "fourier"

    ALL = (EPS_OCCUPATION, FOURIER)

class Decision:
    """Outcome of a verification step"""
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

class FunctionId:
    """Built-in test function families"""
    GAUSSIAN_BUMP = "gaussian_bump"
    COMPACT_BUMP = "compact_bump"
    INDICATOR_INTERVAL = "indicator_interval"
    SIGNED_DIFFERENCE = "signed_difference"
    COMBINATION = "combination"


class ReportRow(TypedDict):
    """One machine-readable row of a verification report"""
    name: str
    statistic: float
    threshold: float
    decision: str
    p_value: Optional[float]
    n: int

# Type aliases for common shapes
Interval = Tuple[float, float]
Metadata = Dict[str, Any]
ArrayLike = Union[float, np.ndarray]


def _frozen_array(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ProcessSpec:
    """Which process to sample, on which grid, with which sampler"""
    kind: str
    tau: float
    horizon: float = 1.0
    n_steps: int = 1024
    sampler: str = SamplerType.CHOLESKY

    def __post_init__(self):
        if self.kind not in ProcessKind.ALL:
            raise ValidationError(f"Unknown process kind: {self.kind}")
        if self.sampler not in SamplerType.ALL:
            raise ValidationError(f"Unknown sampler: {self.sampler}")
        if not math.isfinite(self.tau):
            raise DomainError(f"Index must be finite, got {self.tau}")
        if self.kind == ProcessKind.FBM and not 0.0 < self.tau < 1.0:
            raise DomainError(f"Hurst index must lie in (0, 1), got {self.tau}")
        if self.kind == ProcessKind.RL and not self.tau > 0.0:
            raise DomainError(f"Riemann-Liouville index must be positive, got {self.tau}")
        if not self.horizon > 0.0:
            raise ValidationError(f"Horizon must be positive, got {self.horizon}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValidationError(f"n_steps must be a positive integer, got {self.n_steps}")
        if self.sampler == SamplerType.CIRCULANT and self.kind != ProcessKind.FBM:
            raise ValidationError("The circulant sampler only supports fBm")
        if self.sampler == SamplerType.KERNEL_CONV and self.kind != ProcessKind.RL:
            raise ValidationError("The kernel convolution sampler only supports the RL process")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    def times(self) -> np.ndarray:
        """Uniform grid t_i = i*T/n, i = 0..n"""
        return np.arange(self.n_steps + 1, dtype=float) * self.dt

    def replace(self, **changes: Any) -> "ProcessSpec":
        """Return a copy with some fields changed (re-validated)"""
        values = {
            "kind": self.kind,
            "tau": self.tau,
            "horizon": self.horizon,
            "n_steps": self.n_steps,
            "sampler": self.sampler,
        }
        values.update(changes)
        return ProcessSpec(**values)


@dataclass(frozen=True)
class PathGrid:
    """
    A sampled trajectory on a uniform grid.

    Sampler output always starts at the origin. Shifted or translated paths
    carry their starting value in `origin`, so values[0] == origin holds for
    every PathGrid.
    """
    times: np.ndarray
    values: np.ndarray
    spec: ProcessSpec
    seed: int
    origin: float = 0.0
    metadata: Metadata = field(default_factory=dict)

    def __post_init__(self):
        times = _frozen_array(self.times)
        values = _frozen_array(self.values)
        expected = self.spec.n_steps + 1
        if times.shape != (expected,) or values.shape != (expected,):
            raise ValidationError(
                f"Path arrays must have length {expected}, got {times.shape} and {values.shape}"
            )
        if times[0] != 0.0 or not np.allclose(times, self.spec.times(), rtol=1e-12, atol=0.0):
            raise ValidationError("Path times must form the uniform grid i*T/n starting at 0")
        if values[0] != self.origin:
            raise ValidationError(
                f"Path must start at its origin {self.origin}, got {values[0]}"
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dt(self) -> float:
        return self.spec.dt

    @property
    def horizon(self) -> float:
        return self.spec.horizon

    def index_of(self, t: float) -> int:
        """Grid index of time t, which must lie on the grid up to rounding"""
        position = t / self.dt
        index = int(round(position))
        if abs(position - index) > 1e-9 * max(1.0, abs(position)) or not 0 <= index <= self.spec.n_steps:
            raise ValidationError(f"Time {t} is not a grid time of this path")
        return index


@dataclass(frozen=True)
class CovarianceMatrix:
    """Covariance of a process on its grid times (t=0 row included)"""
    entries: np.ndarray
    times: np.ndarray
    min_eigenvalue: float
    clipped: int = 0

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries))
        object.__setattr__(self, "times", _frozen_array(self.times))


@dataclass(frozen=True)
class OccupationEstimate:
    """Time spent by a path in A = [set_lo, set_hi] during B = [window_lo, window_hi]"""
    set_lo: float
    set_hi: float
    window_lo: float
    window_hi: float
    value: float


@dataclass(frozen=True)
class LocalTimeField:
    """Estimated local time L(x, t) on a rectangular level/time grid"""
    x_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    estimator: str
    bandwidth: float
    source_spec: ProcessSpec
    value_range: Interval
    metadata: Metadata = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "x_grid", _frozen_array(self.x_grid))
        object.__setattr__(self, "t_grid", _frozen_array(self.t_grid))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.shape != (self.x_grid.size, self.t_grid.size):
            raise ValidationError(
                f"Field values must have shape {(self.x_grid.size, self.t_grid.size)}, "
                f"got {self.values.shape}"
            )

    @property
    def dx(self) -> float:
        if self.x_grid.size < 2:
            return 0.0
        return float(self.x_grid[1] - self.x_grid[0])

    def column(self, t: float) -> np.ndarray:
        """L(., t) for a time on the field's t grid"""
        matches = np.flatnonzero(np.isclose(self.t_grid, t, rtol=1e-12, atol=1e-12))
        if matches.size == 0:
            raise ValidationError(f"Time {t} is not on the field's t grid")
        return self.values[:, matches[0]]


@dataclass(frozen=True)
class ResidualSeries:
    """J(t) = int_0^t f(X) ds - f_bar L(0, t) on a time grid for one path"""
    t_grid: np.ndarray
    J: np.ndarray
    tau: float
    f: "TestFunction"
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "t_grid", _frozen_array(self.t_grid))
        object.__setattr__(self, "J", _frozen_array(self.J))


@dataclass(frozen=True)
class RateFit:
    """Quantile-envelope regression of log|J| on log t"""
    slope: float
    ci_lo: float
    ci_hi: float
    intercept: float
    n_replicates: int
    window: Interval


@dataclass(frozen=True)
class StatisticEnsemble:
    """One scalar statistic evaluated on each replicate of an experiment"""
    values: np.ndarray
    tau: float
    statistic: str
    time: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class LilConstants:
    """Constants of the local time law of the iterated logarithm"""
    tau: float
    kind: str
    delta_tau: float
    theta0: float
    theta_lo: float
    theta_hi: float
    c_tau: float
    limsup_lo: float
    limsup_hi: float
    bracket_ordered: bool


@dataclass
class VerificationReport:
    """Result of one named statistical check"""
    name: str
    statistic: float
    threshold: float
    decision: str
    n_replicates: int
    p_value: Optional[float] = None
    metadata: Metadata = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.decision == Decision.FAIL

    def as_row(self) -> ReportRow:
        return ReportRow(
            name=self.name,
            statistic=float(self.statistic),
            threshold=float(self.threshold),
            decision=self.decision,
            p_value=None if self.p_value is None else float(self.p_value),
            n=int(self.n_replicates),
        )


ReportList = List[VerificationReport]


@dataclass(frozen=True)
class VerifySettings:
    """Scales and windows of the registered checks"""
    nu: Optional[float] = None
    translation_offset: float = 5.0
    scale_lambdas: Tuple[float, ...] = (4.0, 16.0)
    rate_horizon: float = 1000.0
    rate_steps: int = 8192
    rate_window: Interval = (10.0, 1000.0)
    lil_horizon: float = 10000.0
    lil_steps: int = 16384
    lil_window: Interval = (100.0, 10000.0)
    n_times: int = 64
    n_levels: int = 257
    n_boot: int = 1000
    min_ensemble: int = 1000
    min_rate_replicates: int = 50
    # first-order limit functional; narrow enough that lambda = 64 is near the limit
    limit_function: str = FunctionId.COMPACT_BUMP
    limit_params: Tuple[float, ...] = (1.0, 0.0, 0.3)

    def nu_for(self, tau: float) -> float:
        """Configured nu, or half the upper end of the admissible range"""
        if self.nu is not None:
            return self.nu
        return 0.25 * (1.0 - tau) / tau

    def make_limit_function(self) -> "TestFunction":
        from .functions import TestFunctionRegistry
        return TestFunctionRegistry.create(self.limit_function, self.limit_params)


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment"""
    process: ProcessSpec
    function_id: str = FunctionId.GAUSSIAN_BUMP
    function_params: Tuple[float, ...] = ()
    replicates: int = 1
    master_seed: int = 0
    lambda_ladder: Tuple[float, ...] = (1.0, 4.0, 16.0, 64.0)
    output_dir: str = "fraclt-out"
    checks: Tuple[str, ...] = ()
    threads: int = 1
    cholesky_cap: int = 2048
    write_paths: bool = True
    write_field: bool = False
    verify: VerifySettings = field(default_factory=VerifySettings)

    def make_function(self) -> "TestFunction":
        from .functions import TestFunctionRegistry
        return TestFunctionRegistry.create(self.function_id, self.function_params)
