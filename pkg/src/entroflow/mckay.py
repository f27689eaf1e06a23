"""McKay bivariate gamma family on 0 < x < y.

(X, Y) = (X, X + Z) with X ~ Gamma(alpha1, rate c) and Z ~ Gamma(alpha2, rate c)
independent. The entropy functions ``mckay_entropy``, ``m1_entropy`` and
``m1_entropy_rho`` follow the customary closed forms; note that their
bracketed term K equals minus the differential entropy of (X, Y), so
they are not -E[log m]. ``mckay_shannon_entropy`` gives the latter.

The (alpha2, rho) chart of the alpha1 = 1 submanifold carries c through
c = (1 + rho^2) / (2 rho^2), which is what makes the two M1 entropy forms
coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import specfun
from .errors import DomainError, NoInteriorMaximumError
from .gamma import GammaParams
from .geometry import MetricField, MetricTensor


def _positive(name, v):
    v = float(v)
    if not (math.isfinite(v) and v > 0):
        raise DomainError(f"{name} must be positive and finite, got {v!r}")
    return v


@dataclass(frozen=True)
class McKayParams:
    alpha1: float
    c: float
    alpha2: float

    def __post_init__(self):
        for name in ("alpha1", "c", "alpha2"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @property
    def covariance(self) -> float:
        return self.alpha1 / self.c**2

    @property
    def rho(self) -> float:
        return math.sqrt(self.alpha1 / (self.alpha1 + self.alpha2))

    @classmethod
    def from_sigma_chart(cls, alpha1, sigma12, alpha2) -> "McKayParams":
        a1 = _positive("alpha1", alpha1)
        s = _positive("sigma12", sigma12)
        return cls(a1, math.sqrt(a1 / s), alpha2)


def alpha2_from_rho(rho: float) -> float:
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho!r}")
    return (1.0 - rho * rho) / (rho * rho)


def rho_from_alpha2(alpha2: float) -> float:
    return 1.0 / math.sqrt(1.0 + _positive("alpha2", alpha2))


def c_from_rho(rho: float) -> float:
    """The c implied by the (alpha2, rho) entropy form."""
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho!r}")
    return (1.0 + rho * rho) / (2.0 * rho * rho)


@dataclass(frozen=True)
class M1Point:
    """A point of the alpha1 = 1 submanifold, coordinates (c, alpha2)."""

    c: float
    alpha2: float

    def __post_init__(self):
        for name in ("c", "alpha2"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @property
    def rho(self) -> float:
        return rho_from_alpha2(self.alpha2)

    @classmethod
    def from_rho(cls, c, rho) -> "M1Point":
        return cls(c, alpha2_from_rho(rho))

    def as_mckay(self) -> McKayParams:
        return McKayParams(1.0, self.c, self.alpha2)


def mckay_log_pdf(x: float, y: float, p: McKayParams) -> float:
    if not (x > 0 and y > x):
        raise DomainError(f"McKay density needs 0 < x < y, got x={x!r}, y={y!r}")
    a1, c, a2 = p.alpha1, p.c, p.alpha2
    return ((a1 + a2) * math.log(c) + (a1 - 1.0) * math.log(x)
            + (a2 - 1.0) * math.log(y - x) - c * y
            - specfun.log_gamma(a1) - specfun.log_gamma(a2))


def mckay_pdf(x: float, y: float, p: McKayParams) -> float:
    return math.exp(mckay_log_pdf(x, y, p))


def mckay_pdf_sigma_chart(x, y, alpha1, sigma12, alpha2) -> float:
    """Density parametrized by (alpha1, covariance, alpha2)."""
    return mckay_pdf(x, y, McKayParams.from_sigma_chart(alpha1, sigma12, alpha2))


def mckay_marginals(p: McKayParams) -> tuple[GammaParams, GammaParams]:
    """X and Y marginals as (mean, shape) gamma parameters."""
    kx = p.alpha1
    ky = p.alpha1 + p.alpha2
    return GammaParams(kx / p.c, kx), GammaParams(ky / p.c, ky)


def mckay_correlation(p: McKayParams) -> float:
    return p.rho


def mckay_covariance(p: McKayParams) -> float:
    return p.covariance


def mckay_fisher_metric_3d(p: McKayParams) -> MetricTensor:
    """Fisher metric in (alpha1, c, alpha2) order, with exact partials."""
    a1, c, a2 = p.alpha1, p.c, p.alpha2
    g = np.array([
        [specfun.trigamma(a1), -1.0 / c, 0.0],
        [-1.0 / c, (a1 + a2) / c**2, -1.0 / c],
        [0.0, -1.0 / c, specfun.trigamma(a2)],
    ])
    d = np.zeros((3, 3, 3))
    d[0, 0, 0] = specfun.polygamma2(a1)
    d[0, 1, 1] = 1.0 / c**2
    d[1, 0, 1] = d[1, 1, 0] = 1.0 / c**2
    d[1, 1, 2] = d[1, 2, 1] = 1.0 / c**2
    d[1, 1, 1] = -2.0 * (a1 + a2) / c**3
    d[2, 1, 1] = 1.0 / c**2
    d[2, 2, 2] = specfun.polygamma2(a2)
    return MetricTensor(g, d)


def m1_metric(q: M1Point) -> MetricTensor:
    """Fisher metric of the alpha1 = 1 submanifold in (c, alpha2) order."""
    c, a2 = q.c, q.alpha2
    t1 = specfun.trigamma(a2)
    # det > 0 reduces to (1 + alpha2) psi'(alpha2) > 1
    assert (1.0 + a2) * t1 > 1.0, f"M1 metric not positive-definite at {q}"
    g = np.array([[(1.0 + a2) / c**2, -1.0 / c], [-1.0 / c, t1]])
    d = np.zeros((2, 2, 2))
    d[0, 0, 0] = -2.0 * (1.0 + a2) / c**3
    d[0, 0, 1] = d[0, 1, 0] = 1.0 / c**2
    d[1, 0, 0] = 1.0 / c**2
    d[1, 1, 1] = specfun.polygamma2(a2)
    return MetricTensor(g, d)


def m1_metric_field() -> MetricField:
    return MetricField(lambda q: m1_metric(M1Point(float(q[0]), float(q[1]))),
                       name="mckay-m1")


def _k_term(a1, c, a2):
    return (math.log(c * c) - specfun.log_gamma(a1) - specfun.log_gamma(a2)
            + (a1 - 1.0) * specfun.digamma(a1) + (a2 - 1.0) * specfun.digamma(a2)
            - (a1 + a2))


def mckay_entropy(p: McKayParams) -> float:
    """sqrt(alpha1) c^(-alpha1-1) K over the full three-parameter family."""
    a1, c, a2 = p.alpha1, p.c, p.alpha2
    return math.sqrt(a1) * c ** (-a1 - 1.0) * _k_term(a1, c, a2)


def mckay_shannon_entropy(p: McKayParams) -> float:
    """-E[log m], which is H(X) + H(Z) because (x, z) -> (x, x + z) has unit Jacobian."""
    return -_k_term(p.alpha1, p.c, p.alpha2)


def m1_entropy(q: M1Point) -> float:
    c, a2 = q.c, q.alpha2
    return (2.0 * math.log(c) - specfun.log_gamma(a2)
            + (a2 - 1.0) * specfun.digamma(a2) - (1.0 + a2)) / c**2


def m1_entropy_gradient(q: M1Point) -> np.ndarray:
    """(dS/dc, dS/dalpha2) of the M1 entropy."""
    c, a2 = q.c, q.alpha2
    dc = (2.0 / c**3) * (specfun.log_gamma(a2) - 2.0 * math.log(c)
                         - specfun.digamma(a2) * (a2 - 1.0) + a2 + 2.0)
    da = (specfun.trigamma(a2) * (a2 - 1.0) - 1.0) / c**2
    return np.array([dc, da])


def _offset(alpha2):
    # S = (log u - offset) / u with u = c^2
    return specfun.log_gamma(alpha2) - (alpha2 - 1.0) * specfun.digamma(alpha2) + 1.0 + alpha2


def m1_entropy_rho(alpha2: float, rho: float) -> float:
    """M1 entropy over the (alpha2, rho) chart."""
    a2 = _positive("alpha2", alpha2)
    # rho = 1 (c = 1) is the closure of the chart and still well defined
    if not 0.0 < rho <= 1.0:
        raise DomainError(f"rho must lie in (0, 1], got {rho!r}")
    r2 = rho * rho
    w = 4.0 * r2 * r2 / (r2 + 1.0) ** 2
    return w * (-math.log(w) - specfun.log_gamma(a2)
                + (a2 - 1.0) * specfun.digamma(a2) - (1.0 + a2))


def m1_entropy_rho_gradient(alpha2: float, rho: float) -> np.ndarray:
    """(dS/dalpha2, dS/drho) of ``m1_entropy_rho``."""
    a2 = _positive("alpha2", alpha2)
    c = (1.0 + rho * rho) / (2.0 * rho * rho)
    u = c * c
    da = ((a2 - 1.0) * specfun.trigamma(a2) - 1.0) / u
    ds_du = (1.0 + _offset(a2) - math.log(u)) / (u * u)
    du_drho = -2.0 * c / rho**3
    return np.array([da, ds_du * du_drho])


def max_entropy_locus(alpha2: float, eps: float = 1e-6, grid: int = 64) -> float:
    """The correlation maximizing the M1 entropy at fixed alpha2."""
    a2 = _positive("alpha2", alpha2)

    def dsdr(r):
        return m1_entropy_rho_gradient(a2, r)[1]

    rs = np.geomspace(eps, 1.0 - eps, grid)
    ds = np.array([dsdr(r) for r in rs])
    # maximum: derivative goes from positive to negative as rho increases
    idx = np.flatnonzero((ds[:-1] > 0) & (ds[1:] <= 0))
    if idx.size == 0:
        raise NoInteriorMaximumError(
            f"entropy derivative in rho does not change sign on ({eps}, {1 - eps}) "
            f"for alpha2={a2!r}")
    i = int(idx[0])
    return brentq(dsdr, rs[i], rs[i + 1], xtol=1e-15, maxiter=200)
