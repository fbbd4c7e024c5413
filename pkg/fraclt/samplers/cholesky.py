"""
Cholesky sampler for the fraclt package.
Draws exact Gaussian paths from the analytic covariance of either process.
Cost is cubic in the number of steps, so the grid size is capped.
"""

import logging
from functools import lru_cache
from typing import Any, Dict

import numpy as np
from scipy import linalg

from ..core.covariance import PSD_TOLERANCE, build_covariance
from ..core.types import Metadata, PathGrid, ProcessSpec, SamplerType
from ..exceptions import FactorizationError, ValidationError
from .base import BaseSampler, _positive_int

logger = logging.getLogger(__name__)

DEFAULT_CAP = 2048


@lru_cache(maxsize=32)
def cholesky_factor(spec: ProcessSpec) -> np.ndarray:
    """
    Square-root factor of the covariance restricted to times > 0.

    The lower Cholesky factor when the matrix is numerically positive
    definite. When the PSD repair clipped eigenvalues, or the factorization
    breaks down on a near-singular matrix, the eigen square root
    V diag(sqrt(lambda)) is used instead. Cached per spec; the returned
    array is read-only.

    Raises:
        FactorizationError: If neither factor can be formed
    """
    covariance = build_covariance(spec)
    inner = covariance.entries[1:, 1:]
    factor = None
    if not covariance.clipped:
        try:
            factor = linalg.cholesky(inner, lower=True, check_finite=True)
        except linalg.LinAlgError as e:
            logger.warning("Cholesky factorization failed for %s (%s); using the eigen square root", spec, e)
    if factor is None:
        factor = eigen_factor(inner, spec)
    factor.setflags(write=False)
    return factor


def eigen_factor(inner: np.ndarray, spec: ProcessSpec) -> np.ndarray:
    """V diag(sqrt(lambda)) of a PSD matrix, eigenvalues in [-tol * lambda_max, 0) taken as 0"""
    try:
        eigenvalues, eigenvectors = linalg.eigh(inner, check_finite=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise FactorizationError(f"Eigendecomposition failed for {spec}: {str(e)}")
    if eigenvalues[0] < -PSD_TOLERANCE * max(float(eigenvalues[-1]), 0.0):
        raise FactorizationError(
            f"Covariance of {spec} has eigenvalue {eigenvalues[0]:.3e} beyond the repair tolerance"
        )
    return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


class CholeskySampler(BaseSampler):
    """Exact sampler for fBm and RL paths via the covariance factor"""

    name = SamplerType.CHOLESKY

    def __init__(self, cap: int = DEFAULT_CAP, **kwargs: Any):
        """
        Initialize the Cholesky sampler.

        Args:
            cap: Largest n_steps accepted
            **kwargs: Additional configuration options
        """
        super().__init__(cap=cap, **kwargs)
        self.cap = self.config["cap"]

    def supports(self, spec: ProcessSpec) -> bool:
        return spec.n_steps <= self.cap

    def validate_spec(self, spec: ProcessSpec) -> None:
        if spec.n_steps > self.cap:
            raise ValidationError(
                f"Cholesky sampling is capped at {self.cap} steps, got {spec.n_steps}"
            )

    def _draw(self, spec: ProcessSpec, rng: np.random.Generator) -> "tuple[np.ndarray, Metadata]":
        factor = cholesky_factor(spec.replace(sampler=SamplerType.CHOLESKY))
        z = rng.standard_normal(spec.n_steps)
        return factor @ z, {}

    def _validate_config(self, config: Dict[str, Any]) -> Dict[str, Any]:
        config = dict(config)
        config["cap"] = _positive_int(config, "cap", DEFAULT_CAP)
        return config


def sample_cholesky(spec: ProcessSpec, seed: int, cap: int = DEFAULT_CAP) -> PathGrid:
    """Sample one path of either process from its Cholesky factor"""
    return CholeskySampler(cap=cap).sample(spec, seed)
