"""Weibull lifetime family with scale ``xi`` and shape ``beta``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import EULER_GAMMA, log_gamma


@dataclass(frozen=True)
class WeibullParams:
    xi: float
    beta: float

    def __post_init__(self):
        for name in ("xi", "beta"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)


def weibull_pdf(t: float, p: WeibullParams) -> float:
    if not t > 0:
        raise DomainError(f"Weibull density needs t > 0, got {t!r}")
    z = t / p.xi
    return (p.beta / p.xi) * z ** (p.beta - 1.0) * math.exp(-z**p.beta)


def weibull_reliability(t: float, p: WeibullParams) -> float:
    """Survival probability R(t) = exp(-(t/xi)^beta)."""
    if not t >= 0:
        raise DomainError(f"reliability needs t >= 0, got {t!r}")
    return math.exp(-((t / p.xi) ** p.beta))


def weibull_hazard(t: float, p: WeibullParams) -> float:
    """Failure rate Z(t) = beta xi^(-beta) t^(beta - 1)."""
    if not t > 0:
        raise DomainError(f"hazard needs t > 0, got {t!r}")
    return p.beta * p.xi ** (-p.beta) * t ** (p.beta - 1.0)


def weibull_mean(p: WeibullParams) -> float:
    return p.xi * math.exp(log_gamma(1.0 + 1.0 / p.beta))


def weibull_sd(p: WeibullParams) -> float:
    return p.xi * math.sqrt(_variance_ratio(p.beta)) * math.exp(log_gamma(1.0 + 1.0 / p.beta))


def _variance_ratio(beta: float) -> float:
    # Gamma(1 + 2/beta) / Gamma(1 + 1/beta)^2 - 1, formed in log space
    return math.expm1(log_gamma(1.0 + 2.0 / beta) - 2.0 * log_gamma(1.0 + 1.0 / beta))


def weibull_cv(p: WeibullParams) -> float:
    return math.sqrt(_variance_ratio(p.beta))


def weibull_entropy(p: WeibullParams) -> float:
    b = p.beta
    return -math.log(b) - math.log(1.0 / p.xi) - EULER_GAMMA / b + EULER_GAMMA + 1.0


def weibull_entropy_gradient(p: WeibullParams) -> np.ndarray:
    """(dS/dxi, dS/dbeta); the beta component vanishes at Euler's constant."""
    return np.array([1.0 / p.xi, (EULER_GAMMA - p.beta) / p.beta**2])
