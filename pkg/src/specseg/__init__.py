"""Spectral analysis of semantic segmentation losses, metrics and features."""

from .errors import (
    DegenerateInputError,
    DimensionError,
    EnvelopeError,
    FormatError,
    SpecsegError,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateInputError",
    "DimensionError",
    "EnvelopeError",
    "FormatError",
    "SpecsegError",
]
