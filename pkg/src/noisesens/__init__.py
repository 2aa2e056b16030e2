"""Noise sensitivity, noise stability and influences of Boolean functions."""

from .errors import ContractError, ResourceError
from .spectral import (
    BooleanFunction,
    InfluenceProfile,
    Spectrum,
    influence_profile,
    inverse,
    is_monotone,
    monotonize,
    shift,
    transform,
)
from .montecarlo import Estimate

__version__ = "0.1.0"

__all__ = [
    "BooleanFunction",
    "ContractError",
    "Estimate",
    "InfluenceProfile",
    "ResourceError",
    "Spectrum",
    "influence_profile",
    "inverse",
    "is_monotone",
    "monotonize",
    "shift",
    "transform",
]
