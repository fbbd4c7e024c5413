"""
Input and output processors for the fraclt package.
"""

from .input import ConfigProcessor
from .output import OutputProcessor

__all__ = [
    "ConfigProcessor",
    "OutputProcessor"
]
