"""
Circulant embedding sampler for the fraclt package.
Samples fractional Gaussian noise exactly by embedding its autocovariance in
a circulant matrix diagonalised by the FFT, then integrates it into an fBm
path. Falls back to the Cholesky sampler when the embedding is not
nonnegative within tolerance.
"""

import logging
from functools import lru_cache
from typing import Any, Dict

import numpy as np

from ..core.covariance import fgn_autocovariance
from ..core.types import Metadata, PathGrid, ProcessKind, ProcessSpec, SamplerType
from ..exceptions import EmbeddingError, ValidationError
from ..utils import is_power_of_two
from .base import BaseSampler
from .cholesky import CholeskySampler

logger = logging.getLogger(__name__)

EIGENVALUE_TOLERANCE = 1e-8


@lru_cache(maxsize=32)
def circulant_eigenvalues(H: float, n: int, dt: float) -> np.ndarray:
    """
    Eigenvalues of the 2n circulant embedding of the fGn autocovariance.

    The first row is [g(0), ..., g(n-1), g(n), g(n-1), ..., g(1)].

    Raises:
        EmbeddingError: If an eigenvalue is below -EIGENVALUE_TOLERANCE
    """
    lags = np.arange(n + 1)
    gamma = fgn_autocovariance(lags, H, dt)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigenvalues = np.fft.fft(row).real
    smallest = float(eigenvalues.min())
    if smallest < -EIGENVALUE_TOLERANCE:
        raise EmbeddingError(
            f"Negative circulant eigenvalue {smallest:.3e} for H={H}, n={n}"
        )
    eigenvalues = np.maximum(eigenvalues, 0.0)
    eigenvalues.setflags(write=False)
    return eigenvalues


class CirculantSampler(BaseSampler):
    """FFT sampler for fBm on power-of-two grids"""

    name = SamplerType.CIRCULANT

    def __init__(self, fallback: CholeskySampler = None, **kwargs: Any):
        """
        Initialize the circulant sampler.

        Args:
            fallback: Sampler used when the embedding fails (defaults to a new CholeskySampler)
            **kwargs: Additional configuration options
        """
        super().__init__(**kwargs)
        self.fallback = fallback or CholeskySampler()

    def supports(self, spec: ProcessSpec) -> bool:
        return spec.kind == ProcessKind.FBM and is_power_of_two(spec.n_steps)

    def validate_spec(self, spec: ProcessSpec) -> None:
        if spec.kind != ProcessKind.FBM:
            raise ValidationError("The circulant sampler only supports fBm")
        if not is_power_of_two(spec.n_steps):
            raise ValidationError(
                f"The circulant sampler needs n_steps to be a power of two, got {spec.n_steps}"
            )

    def _draw(self, spec: ProcessSpec, rng: np.random.Generator) -> "tuple[np.ndarray, Metadata]":
        n = spec.n_steps
        try:
            eigenvalues = circulant_eigenvalues(spec.tau, n, spec.dt)
        except EmbeddingError as e:
            logger.warning("%s; falling back to Cholesky", str(e))
            self.fallback.validate_spec(spec)
            values, metadata = self.fallback._draw(spec, rng)
            metadata["fallback"] = SamplerType.CHOLESKY
            return values, metadata

        m = 2 * n
        # Re(F w) has covariance C when w = sqrt(lambda/m) (Z1 + i Z2)
        noise = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        weighted = np.sqrt(eigenvalues / m) * noise
        increments = np.fft.fft(weighted).real[:n]
        return np.cumsum(increments), {}

    def _validate_config(self, config: Dict[str, Any]) -> Dict[str, Any]:
        return dict(config)


def sample_circulant_fbm(spec: ProcessSpec, seed: int) -> PathGrid:
    """
    Sample one fBm path by circulant embedding of fractional Gaussian noise.

    The path metadata carries "fallback": "cholesky" when the embedding failed.
    """
    return CirculantSampler().sample(spec, seed)
