"""Entropy gradient flows and information geometry of gamma-type families."""

from .errors import (DegenerateSampleError, DomainError, EntroflowError,
                     NoInteriorMaximumError, NonFiniteValueError, ResourceLimitError,
                     SingularMetricError)
from .gamma import GammaFitResult, GammaParams
from .mckay import M1Point, McKayParams
from .weibull import WeibullParams

__version__ = "0.1.0"

__all__ = [
    "DegenerateSampleError", "DomainError", "EntroflowError", "NoInteriorMaximumError",
    "NonFiniteValueError", "ResourceLimitError", "SingularMetricError",
    "GammaFitResult", "GammaParams", "M1Point", "McKayParams", "WeibullParams",
]
