"""
Core functionality for the fraclt package.
"""

from .client import SimulationClient
from .covariance import build_covariance, c_h_constant, fbm_covariance, rl_covariance
from .functions import TestFunction, TestFunctionRegistry, combine, test_function
from .special import beta, gamma, log_gamma
from .types import (
    CovarianceMatrix,
    Decision,
    EstimatorType,
    ExperimentConfig,
    FunctionId,
    LilConstants,
    LocalTimeField,
    PathGrid,
    ProcessKind,
    ProcessSpec,
    RateFit,
    ResidualSeries,
    SamplerType,
    StatisticEnsemble,
    VerificationReport,
    VerifySettings,
)

__all__ = [
    "beta",
    "build_covariance",
    "c_h_constant",
    "combine",
    "CovarianceMatrix",
    "Decision",
    "EstimatorType",
    "ExperimentConfig",
    "fbm_covariance",
    "FunctionId",
    "gamma",
    "LilConstants",
    "LocalTimeField",
    "log_gamma",
    "PathGrid",
    "ProcessKind",
    "ProcessSpec",
    "RateFit",
    "ResidualSeries",
    "rl_covariance",
    "SamplerType",
    "SimulationClient",
    "StatisticEnsemble",
    "test_function",
    "TestFunction",
    "TestFunctionRegistry",
    "VerificationReport",
    "VerifySettings",
]
