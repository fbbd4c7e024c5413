"""
Base sampler interface for the fraclt package.
Defines the abstract base class that every path sampler implements.
Samplers are pure functions of (spec, seed) and hold no mutable state
beyond read-only caches, so one instance can serve many threads.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import numpy as np

from ..core.types import Metadata, PathGrid, ProcessSpec
from ..exceptions import ValidationError
from ..utils import make_generator

class BaseSampler(ABC):
    """Base interface for Gaussian path samplers"""

    name: str = "base"

    def __init__(self, **kwargs: Any):
        """
        Initialize the sampler with its configuration.

        Args:
            **kwargs: Sampler-specific configuration
        """
        self.config = self._validate_config(kwargs)

    @abstractmethod
    def supports(self, spec: ProcessSpec) -> bool:
        """
        Whether this sampler can draw paths for the given spec.

        Args:
            spec: Process description

        Returns:
            bool: True if supported
        """
        raise NotImplementedError

    @abstractmethod
    def _draw(self, spec: ProcessSpec, rng: np.random.Generator) -> "tuple[np.ndarray, Metadata]":
        """
        Draw process values at grid times 1..n.

        Args:
            spec: Validated process description
            rng: Generator keyed by the path seed

        Returns:
            Tuple of values (length n_steps) and sampler metadata
        """
        raise NotImplementedError

    def validate_spec(self, spec: ProcessSpec) -> None:
        """
        Check that the spec is one this sampler can handle.

        Raises:
            ValidationError: If the spec is not supported
        """
        if not self.supports(spec):
            raise ValidationError(f"{self.__class__.__name__} does not support {spec}")

    def sample(self, spec: ProcessSpec, seed: int) -> PathGrid:
        """
        Sample one path. Repeated calls with the same seed are bit-identical.

        Args:
            spec: Process description
            seed: Unsigned 64-bit seed

        Returns:
            PathGrid: Path starting at 0 on the uniform grid
        """
        self.validate_spec(spec)
        values, metadata = self._draw(spec, make_generator(seed))
        path_values = np.empty(spec.n_steps + 1)
        path_values[0] = 0.0
        path_values[1:] = values
        metadata.setdefault("sampler", self.name)
        return PathGrid(
            times=spec.times(),
            values=path_values,
            spec=spec,
            seed=seed,
            metadata=metadata,
        )

    def _validate_config(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """
        Validate sampler configuration.

        Args:
            config: Sampler configuration dictionary

        Returns:
            dict: Validated configuration
        """
        return dict(config)


def _positive_int(config: Dict[str, Any], key: str, default: int) -> int:
    value: Optional[Any] = config.get(key, default)
    if value is None:
        return default
    value = int(value)
    if value < 1:
        raise ValidationError(f"{key} must be a positive integer, got {value}")
    return value
