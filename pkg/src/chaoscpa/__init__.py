"""Chosen-plaintext cryptanalysis of a Baker/Arnold/Logistic image block cipher."""

from chaoscpa.errors import (
    AttackFailure,
    KeyValidationError,
    NonSquareImageError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "AttackFailure",
    "KeyValidationError",
    "NonSquareImageError",
    "ValidationError",
]
