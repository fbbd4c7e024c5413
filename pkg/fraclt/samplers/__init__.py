"""
Path samplers for the fraclt package.
"""

from .base import BaseSampler
from .cholesky import CholeskySampler, sample_cholesky
from .circulant import CirculantSampler, sample_circulant_fbm
from .kernel import KernelSampler, kernel_variance_gap, sample_rl_kernel

__all__ = [
    "BaseSampler",
    "CholeskySampler",
    "CirculantSampler",
    "KernelSampler",
    "kernel_variance_gap",
    "sample_cholesky",
    "sample_circulant_fbm",
    "sample_rl_kernel",
]
