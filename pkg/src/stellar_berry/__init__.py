"""Majorana stellar representation of spin states and star-resolved Berry phases."""

from .errors import (
    DegeneratePairError,
    DiscontinuityError,
    InvalidInputError,
    InvalidStateError,
    NumericalFailureError,
    ResourceLimitError,
    StellarError,
)
from .stellar import Direction, SpinState, StarSet, find_stars, majorana_polynomial, state_from_stars

__version__ = "0.1.0"

__all__ = [
    "Direction",
    "SpinState",
    "StarSet",
    "find_stars",
    "majorana_polynomial",
    "state_from_stars",
    "StellarError",
    "InvalidInputError",
    "NumericalFailureError",
    "ResourceLimitError",
    "DegeneratePairError",
    "DiscontinuityError",
    "InvalidStateError",
]
