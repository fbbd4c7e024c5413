"""
Test functions for additive functionals.
This module defines the integrable functions f whose additive functionals
int_0^t f(X(s)) ds are compared against f_bar L(0, t). Each family knows its
integral f_bar and its absolute moments int |x|^k |f(x)| dx. Families are
registered by id so experiment files can name them.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Type

import numpy as np
from scipy import integrate

from ..exceptions import ConfigurationError, ValidationError
from .types import ArrayLike, FunctionId, Interval

@dataclass
class FunctionMetadata:
    """Metadata for test function registration"""
    function_id: str
    description: Optional[str] = None
    param_names: Tuple[str, ...] = ()
    defaults: Tuple[float, ...] = ()
    tags: List[str] = field(default_factory=list)

class TestFunction:
    """Base class for integrable test functions with known integral"""

    __test__ = False  # not a pytest test class

    metadata: FunctionMetadata = FunctionMetadata(function_id="")

    def __init__(self, params: Sequence[float] = ()):
        """
        Initialize the function with its parameters.

        Args:
            params: Positional parameters; missing trailing ones take the family defaults

        Raises:
            ValidationError: If too many parameters are given or they are invalid
        """
        names = self.metadata.param_names
        params = tuple(float(p) for p in params)
        if len(params) > len(names):
            raise ValidationError(
                f"{self.metadata.function_id} takes at most {len(names)} parameters, got {len(params)}"
            )
        self.params = params + tuple(self.metadata.defaults[len(params):])
        self._validate_params()

    @property
    def function_id(self) -> str:
        return self.metadata.function_id

    def param(self, name: str) -> float:
        return self.params[self.metadata.param_names.index(name)]

    def _validate_params(self) -> None:
        """Check parameter ranges. Override in families with constraints."""
        pass

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """
        Evaluate f on an array of levels.

        Args:
            x: Levels

        Returns:
            np.ndarray: f(x)

        Raises:
            NotImplementedError: Must be implemented by subclass
        """
        raise NotImplementedError("Subclasses must implement evaluate")

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self.evaluate(np.asarray(x, dtype=float))

    @property
    def f_bar(self) -> float:
        """
        Integral of f over the real line.

        Raises:
            NotImplementedError: Must be implemented by subclass
        """
        raise NotImplementedError("Subclasses must implement f_bar")

    def support(self) -> Interval:
        """Smallest interval outside which f vanishes"""
        return (-math.inf, math.inf)

    def breakpoints(self) -> Tuple[float, ...]:
        """Points where f is not smooth, passed to quadrature"""
        return ()

    def integral_over(self, lo: float, hi: float) -> float:
        """int_lo^hi f(x) dx by adaptive quadrature"""
        if hi <= lo:
            return 0.0
        s_lo, s_hi = self.support()
        lo, hi = max(lo, s_lo), min(hi, s_hi)
        if hi <= lo:
            return 0.0
        return _quad(lambda x: float(self(x)), lo, hi, self.breakpoints())

    def k_moment(self, k: float) -> float:
        """
        Absolute moment int |x|^k |f(x)| dx.

        Args:
            k: Moment order, > 0

        Returns:
            float: Moment value (quadrature unless the family has a closed form)
        """
        if not k > 0.0:
            raise ValidationError(f"Moment order must be positive, got {k}")
        lo, hi = self.support()
        return _quad(lambda x: abs(x) ** k * abs(float(self(x))), lo, hi, self.breakpoints() + (0.0,))

    def require_nonzero_mean(self) -> None:
        """Raise ValidationError if f_bar is zero (main theorem hypothesis)"""
        if self.f_bar == 0.0:
            raise ValidationError(
                f"{self.function_id} has zero integral; use it only as a negative control"
            )

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}{self.params}"


def _quad(func, lo: float, hi: float, points: Tuple[float, ...] = ()) -> float:
    finite = math.isfinite(lo) and math.isfinite(hi)
    if finite and points:
        inner = tuple(p for p in points if lo < p < hi)
        value, _ = integrate.quad(func, lo, hi, points=inner or None, limit=200)
        return float(value)
    if not finite and points:
        # split at the breakpoints; quad does not accept points on infinite ranges
        cuts = sorted(p for p in points if lo < p < hi)
        edges = [lo] + cuts + [hi]
        return float(sum(integrate.quad(func, a, b, limit=200)[0] for a, b in zip(edges[:-1], edges[1:])))
    value, _ = integrate.quad(func, lo, hi, limit=200)
    return float(value)


# Function registry for creating functions by id
class TestFunctionRegistry:
    """Registry of test function families"""

    __test__ = False

    _families: Dict[str, Type[TestFunction]] = {}

    @classmethod
    def register(cls, family: Type[TestFunction]) -> None:
        """Register a family"""
        cls._families[family.metadata.function_id] = family

    @classmethod
    def get(cls, function_id: str) -> Type[TestFunction]:
        """Get a family by id"""
        if function_id not in cls._families:
            raise ConfigurationError(f"Test function not found: {function_id}")
        return cls._families[function_id]

    @classmethod
    def create(cls, function_id: str, params: Sequence[float] = ()) -> TestFunction:
        """Instantiate a family with parameters"""
        return cls.get(function_id)(params)

    @classmethod
    def list(cls) -> List[str]:
        """List all registered families"""
        return list(cls._families.keys())

# Decorator for registering families
def test_function(
    function_id: str,
    param_names: Sequence[str],
    defaults: Sequence[float],
    description: Optional[str] = None,
):
    """Decorator for registering test function families"""
    def decorator(cls):
        cls.metadata = FunctionMetadata(
            function_id=function_id,
            description=description,
            param_names=tuple(param_names),
            defaults=tuple(float(d) for d in defaults),
        )
        TestFunctionRegistry.register(cls)
        return cls
    return decorator

test_function.__test__ = False


@test_function(
    FunctionId.GAUSSIAN_BUMP,
    param_names=("amplitude", "center", "width"),
    defaults=(1.0, 0.0, 1.0),
    description="a * exp(-(x - c)^2 / (2 w^2))",
)
class GaussianBump(TestFunction):
    """Gaussian-shaped bump"""

    def _validate_params(self) -> None:
        if not self.param("width") > 0.0:
            raise ValidationError("Gaussian bump width must be positive")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a, c, w = self.params
        return a * np.exp(-0.5 * ((x - c) / w) ** 2)

    @property
    def f_bar(self) -> float:
        a, _, w = self.params
        return a * w * math.sqrt(2.0 * math.pi)


@lru_cache(maxsize=1)
def _compact_bump_mass() -> float:
    value, _ = integrate.quad(lambda y: math.exp(1.0 - 1.0 / (1.0 - y * y)), -1.0, 1.0)
    return float(value)


@test_function(
    FunctionId.COMPACT_BUMP,
    param_names=("amplitude", "center", "radius"),
    defaults=(1.0, 0.0, 1.0),
    description="a * exp(1 - 1 / (1 - ((x - c)/r)^2)) on |x - c| < r",
)
class CompactBump(TestFunction):
    """Smooth bump with compact support, peak value a at the center"""

    def _validate_params(self) -> None:
        if not self.param("radius") > 0.0:
            raise ValidationError("Compact bump radius must be positive")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a, c, r = self.params
        y = np.asarray((x - c) / r, dtype=float)
        inside = np.abs(y) < 1.0
        safe = np.where(inside, y, 0.0)
        return np.where(inside, a * np.exp(1.0 - 1.0 / (1.0 - safe ** 2)), 0.0)

    @property
    def f_bar(self) -> float:
        a, _, r = self.params
        return a * r * _compact_bump_mass()

    def support(self) -> Interval:
        _, c, r = self.params
        return (c - r, c + r)


@test_function(
    FunctionId.INDICATOR_INTERVAL,
    param_names=("lo", "hi", "amplitude"),
    defaults=(-1.0, 1.0, 1.0),
    description="a * 1[lo <= x <= hi]",
)
class IndicatorInterval(TestFunction):
    """Scaled indicator of a closed interval"""

    def _validate_params(self) -> None:
        lo, hi, _ = self.params
        if not lo < hi:
            raise ValidationError(f"Indicator interval needs lo < hi, got [{lo}, {hi}]")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        lo, hi, a = self.params
        return np.where((x >= lo) & (x <= hi), a, 0.0)

    @property
    def f_bar(self) -> float:
        lo, hi, a = self.params
        return a * (hi - lo)

    def support(self) -> Interval:
        lo, hi, _ = self.params
        return (lo, hi)

    def breakpoints(self) -> Tuple[float, ...]:
        lo, hi, _ = self.params
        return (lo, hi)

    def k_moment(self, k: float) -> float:
        if not k > 0.0:
            raise ValidationError(f"Moment order must be positive, got {k}")
        lo, hi, a = self.params

        def antiderivative(x: float) -> float:
            return math.copysign(abs(x) ** (k + 1.0), x) / (k + 1.0)

        return abs(a) * (antiderivative(hi) - antiderivative(lo))


@test_function(
    FunctionId.SIGNED_DIFFERENCE,
    param_names=("amplitude", "center", "width", "offset"),
    defaults=(1.0, 0.0, 1.0, 1.0),
    description="g(x - c) - g(x - c - d) for a Gaussian bump g; integral zero",
)
class SignedDifference(TestFunction):
    """Difference of two shifted Gaussian bumps, used as a zero-mean control"""

    def _validate_params(self) -> None:
        if not self.param("width") > 0.0:
            raise ValidationError("Signed difference width must be positive")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        a, c, w, d = self.params
        return a * (np.exp(-0.5 * ((x - c) / w) ** 2) - np.exp(-0.5 * ((x - c - d) / w) ** 2))

    @property
    def f_bar(self) -> float:
        return 0.0


class Combination(TestFunction):
    """Finite linear combination sum c_i f_i of test functions"""

    metadata = FunctionMetadata(function_id=FunctionId.COMBINATION, description="sum c_i f_i")

    def __init__(self, terms: Sequence[Tuple[float, TestFunction]]):
        if not terms:
            raise ValidationError("A combination needs at least one term")
        self.terms = tuple((float(c), f) for c, f in terms)
        self.params = tuple(c for c, _ in self.terms)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return sum(c * f.evaluate(x) for c, f in self.terms)

    @property
    def f_bar(self) -> float:
        return float(sum(c * f.f_bar for c, f in self.terms))

    def support(self) -> Interval:
        supports = [f.support() for _, f in self.terms]
        return (min(s[0] for s in supports), max(s[1] for s in supports))

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(p for _, f in self.terms for p in f.breakpoints())

    def __repr__(self) -> str:
        return f"Combination({list(self.terms)})"


def combine(*terms: Tuple[float, TestFunction]) -> Combination:
    """Build the linear combination sum c_i f_i"""
    return Combination(terms)
