"""
Utility functions used throughout the fraclt package.
Contains seeding helpers, number formatting for artifacts and small
validation helpers shared by several modules.
"""

import hashlib
import math
from typing import Optional, Sequence

import numpy as np

from .exceptions import ValidationError

SEED_MASK = (1 << 64) - 1


def derive_seed(master_seed: int, replicate: int) -> int:
    """
    Derive the seed of one replicate from the experiment's master seed.

    The derivation is blake2b over the two values packed as little-endian
    unsigned 64-bit integers, truncated to an 8-byte digest. It does not
    depend on scheduling, so replicate r always draws the same stream.

    Args:
        master_seed: Experiment seed (reduced modulo 2**64)
        replicate: Replicate index, >= 0

    Returns:
        int: Unsigned 64-bit seed
    """
    if replicate < 0:
        raise ValidationError(f"Replicate index must be non-negative, got {replicate}")
    payload = (master_seed & SEED_MASK).to_bytes(8, "little") + (replicate & SEED_MASK).to_bytes(8, "little")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_stream(master_seed: int, label: str) -> int:
    """Master seed of a named sub-experiment, hashed the same way as derive_seed"""
    payload = (master_seed & SEED_MASK).to_bytes(8, "little") + label.encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_generator(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by a 64-bit seed"""
    return np.random.Generator(np.random.Philox(key=seed & SEED_MASK))


def format_float(value: Optional[float]) -> str:
    """
    Format a float for CSV output at full double precision.

    Args:
        value: Number to format, or None

    Returns:
        str: 17 significant digits, or an empty string for None
    """
    if value is None:
        return ""
    return format(float(value), ".17g")


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def validate_interval(lo: float, hi: float, name: str = "interval") -> None:
    """Raise ValidationError unless lo <= hi (infinite ends allowed)"""
    if math.isnan(lo) or math.isnan(hi) or lo > hi:
        raise ValidationError(f"Invalid {name}: [{lo}, {hi}]")


def validate_sorted(grid: Sequence[float], name: str = "grid") -> np.ndarray:
    """Return the grid as an array, raising ValidationError if it is not increasing"""
    array = np.asarray(grid, dtype=float)
    if array.ndim != 1 or array.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d sequence")
    if np.any(np.diff(array) <= 0):
        raise ValidationError(f"{name} must be strictly increasing")
    return array


def format_error_message(error: Exception, context: Optional[str] = None) -> str:
    """
    Format error message with optional context.

    Args:
        error: Exception to format
        context: Optional context to add to message

    Returns:
        str: Formatted error message
    """
    message = str(error)
    if context:
        message = f"{context}: {message}"
    return message
