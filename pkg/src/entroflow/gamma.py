"""The gamma 2-manifold in (mean, shape) coordinates.

Density, Shannon entropy and its gradient, the Fisher metric with exact
partials, and maximum-likelihood fitting via the mean and mean-log
statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import specfun
from .errors import DegenerateSampleError, DomainError
from .geometry import MetricField, MetricTensor

DEGENERATE_TOL = 1e-14
KAPPA_BRACKET = (1e-8, 1e8)


@dataclass(frozen=True)
class GammaParams:
    """A gamma distribution with mean ``mu`` and shape ``kappa``."""

    mu: float
    kappa: float

    def __post_init__(self):
        for name in ("mu", "kappa"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def sigma(self) -> float:
        return self.mu / math.sqrt(self.kappa)

    @property
    def cv(self) -> float:
        return 1.0 / math.sqrt(self.kappa)

    @property
    def rate(self) -> float:
        return self.kappa / self.mu


@dataclass(frozen=True)
class GammaFitResult:
    params: GammaParams
    residual: float
    iterations: int
    n: int
    mean: float
    mean_log: float


def gamma_log_pdf(x: float, p: GammaParams) -> float:
    if not x > 0:
        raise DomainError(f"gamma density needs x > 0, got {x!r}")
    k, mu = p.kappa, p.mu
    return (-x * k / mu + (k - 1.0) * math.log(x) + k * math.log(k / mu)
            - specfun.log_gamma(k))


def gamma_pdf(x: float, p: GammaParams) -> float:
    return math.exp(gamma_log_pdf(x, p))


def gamma_cdf(x: float, p: GammaParams) -> float:
    if x <= 0:
        return 0.0
    return specfun.reg_lower_incomplete_gamma(p.kappa, x * p.rate)


def gamma_entropy(p: GammaParams) -> float:
    k, mu = p.kappa, p.mu
    return k - math.log(k / mu) + specfun.log_gamma(k) - (k - 1.0) * specfun.digamma(k)


def gamma_entropy_gradient(p: GammaParams) -> np.ndarray:
    """(dS/dmu, dS/dkappa)."""
    k = p.kappa
    return np.array([1.0 / p.mu, -(k - 1.0) * (k * specfun.trigamma(k) - 1.0) / k])


def gamma_fisher_metric(p: GammaParams) -> MetricTensor:
    """diag(kappa/mu^2, psi'(kappa) - 1/kappa) with partials in (mu, kappa) order."""
    mu, k = p.mu, p.kappa
    g = np.array([[k / mu**2, 0.0], [0.0, specfun.trigamma(k) - 1.0 / k]])
    d = np.zeros((2, 2, 2))
    d[0, 0, 0] = -2.0 * k / mu**3
    d[1, 0, 0] = 1.0 / mu**2
    d[1, 1, 1] = specfun.polygamma2(k) + 1.0 / k**2
    return MetricTensor(g, d)


def gamma_metric_field() -> MetricField:
    return MetricField(lambda q: gamma_fisher_metric(GammaParams(float(q[0]), float(q[1]))),
                       name="gamma")


def _initial_kappa(s: float) -> float:
    return (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)


def solve_kappa(s: float, tol: float = 1e-10, max_iter: int = 100) -> tuple[float, float, int]:
    """Solve log(kappa) - psi(kappa) = s for kappa; returns (kappa, residual, iterations).

    Newton from the Greenspan-type start, falling back to bisection if an
    iterate leaves the positive axis or fails to converge.
    """
    if not s > DEGENERATE_TOL:
        raise DegenerateSampleError(
            f"log mean - mean log = {s!r}; zero dispersion, shape estimate diverges")

    def phi(k):
        return math.log(k) - specfun.digamma(k) - s

    k = _initial_kappa(s)
    for it in range(1, max_iter + 1):
        f = phi(k)
        if abs(f) <= tol * 1e-2:
            return k, f, it
        step = f / (1.0 / k - specfun.trigamma(k))
        nxt = k - step
        if not (nxt > 0 and math.isfinite(nxt)):
            break
        if abs(nxt - k) <= 1e-15 * k:
            k = nxt
            return k, phi(k), it
        k = nxt
    else:
        it = max_iter
    # phi is strictly decreasing, so bisection on a sign bracket always lands
    lo, hi = KAPPA_BRACKET
    if phi(hi) > 0 or phi(lo) < 0:
        raise DomainError(f"shape estimate for s={s!r} lies outside {KAPPA_BRACKET}")
    n = 0
    while n < 400:
        mid = math.sqrt(lo * hi) if hi / lo > 4 else 0.5 * (lo + hi)
        fm = phi(mid)
        n += 1
        if fm > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * hi:
            break
    k = 0.5 * (lo + hi)
    return k, phi(k), it + n


def gamma_mle_from_moments(mean: float, mean_log: float, n: int) -> GammaFitResult:
    """Fit from the sufficient statistics X-bar and mean(log X)."""
    if n < 2:
        raise DomainError(f"gamma fit needs at least 2 samples, got {n}")
    s = math.log(mean) - mean_log
    k, resid, iters = solve_kappa(s)
    return GammaFitResult(GammaParams(mean, k), resid, iters, n, mean, mean_log)


def gamma_mle(samples: Iterable[float]) -> GammaFitResult:
    xs = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples,
                    dtype=float)
    if xs.size < 2:
        raise DomainError(f"gamma fit needs at least 2 samples, got {xs.size}")
    if not np.all(np.isfinite(xs)) or np.any(xs <= 0):
        raise DomainError("gamma fit needs positive finite samples")
    mean = math.fsum(xs) / xs.size
    mean_log = math.fsum(np.log(xs)) / xs.size
    return gamma_mle_from_moments(mean, mean_log, xs.size)
