"""
fraclt
Local times and additive functionals of fractional Brownian motion and
Riemann-Liouville processes: path sampling, local time estimation and
Monte Carlo verification of scaling, strong approximation and LIL laws.
"""

from .core.client import SimulationClient
from .core.functions import TestFunction, TestFunctionRegistry, combine, test_function
from .core.runner import ExperimentRunner, run
from .core.types import Decision, EstimatorType, ExperimentConfig, ProcessKind, ProcessSpec, SamplerType
from .analysis.checks import CheckRegistry, check
from .exceptions import ConfigurationError, FracltError, NumericalError, SamplerError, ValidationError

__version__ = "0.1.0"
__all__ = [
    "SimulationClient",
    "ExperimentRunner",
    "run",
    "TestFunction",
    "TestFunctionRegistry",
    "combine",
    "test_function",
    "CheckRegistry",
    "check",
    "Decision",
    "EstimatorType",
    "ExperimentConfig",
    "ProcessKind",
    "ProcessSpec",
    "SamplerType",
    "FracltError",
    "ValidationError",
    "ConfigurationError",
    "SamplerError",
    "NumericalError",
]
