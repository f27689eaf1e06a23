"""Two-dimensional Riemannian machinery and flow integration.

Metric fields return a :class:`MetricTensor` holding both the matrix and its
coordinate partials, so Christoffel symbols can be formed without extra
evaluations. Geodesics and gradient-flow integral curves are integrated with
fixed-step classical RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, NonFiniteValueError, SingularMetricError

SINGULAR_DET = 1e-14
GEODESIC_BOUNDARY = 1e-6
FLOW_BOUNDS = (1e-8, 1e8)


@dataclass(frozen=True)
class MetricTensor:
    """A symmetric matrix g_ij at a point, with partials[k, i, j] = d_k g_ij."""

    matrix: np.ndarray
    partials: Optional[np.ndarray] = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def inverse(self) -> np.ndarray:
        det = self.det
        if not det > SINGULAR_DET:
            raise SingularMetricError(f"metric determinant {det!r} <= {SINGULAR_DET}")
        return np.linalg.inv(self.matrix)

    def leading_minors(self) -> list[float]:
        g = self.matrix
        return [float(np.linalg.det(g[:k, :k])) for k in range(1, g.shape[0] + 1)]

    def is_positive_definite(self) -> bool:
        return all(m > 0.0 for m in self.leading_minors())

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return math.sqrt(max(float(v @ self.matrix @ v), 0.0))


def _fd_step(x: float) -> float:
    return max(1e-6, 1e-6 * abs(x))


class MetricField:
    """A metric as a function of position.

    ``evaluate`` maps a point to a MetricTensor. When ``exact_partials`` is
    False, or the tensor carries no partials, they are filled in by central
    differences with a scale-aware step.
    """

    def __init__(self, evaluate: Callable[[np.ndarray], MetricTensor],
                 exact_partials: bool = True, dimension: int = 2, name: str = ""):
        self._evaluate = evaluate
        self.exact_partials = exact_partials
        self.dimension = dimension
        self.name = name

    @classmethod
    def from_matrix(cls, matrix_fn: Callable[[np.ndarray], np.ndarray],
                    dimension: int = 2, name: str = "") -> "MetricField":
        """Wrap a bare matrix function; partials come from finite differences."""
        def evaluate(p):
            return MetricTensor(np.asarray(matrix_fn(p), dtype=float))
        return cls(evaluate, exact_partials=False, dimension=dimension, name=name)

    def matrix(self, point) -> np.ndarray:
        return self._evaluate(np.asarray(point, dtype=float)).matrix

    def finite_difference_partials(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        n = self.dimension
        out = np.empty((n, n, n))
        for k in range(n):
            h = _fd_step(p[k])
            up = p.copy()
            dn = p.copy()
            up[k] += h
            dn[k] -= h
            out[k] = (self.matrix(up) - self.matrix(dn)) / (2.0 * h)
        return out

    def __call__(self, point) -> MetricTensor:
        p = np.asarray(point, dtype=float)
        g = self._evaluate(p)
        if self.exact_partials and g.partials is not None:
            return g
        return MetricTensor(g.matrix, self.finite_difference_partials(p))

    def with_finite_differences(self) -> "MetricField":
        return MetricField(self._evaluate, exact_partials=False,
                           dimension=self.dimension, name=self.name)


def flat_metric(dimension: int = 2) -> MetricField:
    eye = np.eye(dimension)
    zeros = np.zeros((dimension,) * 3)
    return MetricField(lambda p: MetricTensor(eye, zeros), dimension=dimension,
                       name="flat")


@dataclass
class Trajectory:
    """A time-sampled curve in a two-dimensional parameter space."""

    times: np.ndarray
    points: np.ndarray
    velocities: Optional[np.ndarray] = None
    truncated: bool = False
    note: str = ""

    def __len__(self) -> int:
        return len(self.times)

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    def reversed(self) -> "Trajectory":
        vel = None if self.velocities is None else -self.velocities[::-1]
        return Trajectory(self.times[-1] - self.times[::-1], self.points[::-1].copy(),
                          vel, self.truncated, self.note)


@dataclass
class GridField:
    """Scalar field sampled on a Cartesian grid; values[j, i] = f(x[i], y[j])."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    x_label: str = "x"
    y_label: str = "y"
    overlays: dict = field(default_factory=dict)


def christoffel(metric: MetricField, point) -> np.ndarray:
    """Levi-Civita connection coefficients gamma[k, i, j] at ``point``."""
    g = metric(point)
    ginv = g.inverse()
    d = g.partials  # d[l, i, j] = d_l g_ij
    # lower[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    lower = np.transpose(d, (2, 0, 1)) + np.transpose(d, (2, 1, 0)) - d
    gam = 0.5 * np.einsum("kl,lij->kij", ginv, lower)
    return 0.5 * (gam + np.transpose(gam, (0, 2, 1)))


def _steps(t_max: float, step: float) -> tuple[int, float]:
    if not (step > 0 and math.isfinite(step)):
        raise DomainError(f"step must be positive, got {step!r}")
    if not (t_max > 0 and math.isfinite(t_max)):
        raise DomainError(f"t_max must be positive, got {t_max!r}")
    n = max(1, int(round(t_max / step)))
    return n, t_max / n


def _rk4(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def geodesic_shoot(metric: MetricField, start, velocity, t_max: float,
                   step: float, boundary: float = GEODESIC_BOUNDARY) -> Trajectory:
    """Integrate the geodesic equation from ``start`` with initial ``velocity``.

    The curve is truncated, with ``truncated`` set, once any coordinate comes
    within ``boundary`` of zero or the state stops being finite.
    """
    n, h = _steps(t_max, step)
    dim = metric.dimension
    state = np.concatenate([np.asarray(start, float), np.asarray(velocity, float)])
    if np.any(state[:dim] <= boundary):
        raise DomainError(f"start {start!r} is outside the positive domain")

    def rhs(s):
        x, v = s[:dim], s[dim:]
        if np.any(x <= boundary) or not np.all(np.isfinite(s)):
            raise _LeftDomain
        gam = christoffel(metric, x)
        return np.concatenate([v, -np.einsum("kij,i,j->k", gam, v, v)])

    times = [0.0]
    states = [state]
    truncated = False
    for i in range(1, n + 1):
        try:
            nxt = _rk4(rhs, states[-1], h)
        except _LeftDomain:
            truncated = True
            break
        if np.any(nxt[:dim] <= boundary) or not np.all(np.isfinite(nxt)):
            truncated = True
            break
        times.append(i * h)
        states.append(nxt)
    arr = np.array(states)
    note = f"boundary reached at t={times[-1]:.9f}" if truncated else ""
    return Trajectory(np.array(times), arr[:, :dim], arr[:, dim:], truncated, note)


class _LeftDomain(Exception):
    pass


def arc_length(metric: MetricField, traj: Trajectory) -> float:
    """Midpoint-rule information length of a sampled curve."""
    pts = np.asarray(traj.points, float)
    if len(pts) < 2:
        raise DomainError("arc length needs at least two points")
    total = []
    for a, b in zip(pts[:-1], pts[1:]):
        dx = b - a
        if not np.any(dx):
            continue
        g = metric.matrix(0.5 * (a + b))
        total.append(math.sqrt(max(float(dx @ g @ dx), 0.0)))
    return math.fsum(total)


def gradient_flow(gradient: Callable[[np.ndarray], Sequence[float]], start,
                  t_max: float, step: float,
                  bounds: Sequence[tuple[float, float]] | None = None) -> Trajectory:
    """Integral curve of dc/dt = gradient(c) by RK4.

    ``bounds`` gives an open interval per coordinate, (1e-8, 1e8) by default;
    leaving it stops the curve with ``truncated`` set.
    """
    n, h = _steps(t_max, step)
    y0 = np.asarray(start, dtype=float)
    if bounds is None:
        bounds = [FLOW_BOUNDS] * len(y0)
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])

    def inside(y):
        return bool(np.all(y > lo) and np.all(y < hi))

    if not inside(y0):
        raise DomainError(f"start {start!r} is outside the flow domain")

    def rhs(y):
        if not inside(y):
            raise _LeftDomain
        g = np.asarray(gradient(y), dtype=float)
        if not np.all(np.isfinite(g)):
            raise NonFiniteValueError(f"non-finite gradient at {y.tolist()}", y)
        return g

    times = [0.0]
    pts = [y0]
    truncated = False
    for i in range(1, n + 1):
        try:
            nxt = _rk4(rhs, pts[-1], h)
        except _LeftDomain:
            truncated = True
            break
        if not inside(nxt):
            truncated = True
            break
        times.append(i * h)
        pts.append(nxt)
    note = f"boundary reached at t={times[-1]:.9f}" if truncated else ""
    return Trajectory(np.array(times), np.array(pts), None, truncated, note)


def _axis(rng) -> np.ndarray:
    lo, hi, n = rng
    n = int(n)
    if not lo < hi:
        raise DomainError(f"range needs lo < hi, got {lo!r}:{hi!r}")
    if n < 2:
        raise DomainError(f"range needs at least 2 samples, got {n}")
    return np.linspace(float(lo), float(hi), n)


def grid_eval(fn: Callable[[float, float], float], x_range, y_range,
              x_label: str = "x", y_label: str = "y") -> GridField:
    """Evaluate ``fn(x, y)`` on the grid spanned by two (lo, hi, n) ranges."""
    xs = _axis(x_range)
    ys = _axis(y_range)
    values = np.empty((len(ys), len(xs)))
    for j, yv in enumerate(ys):
        for i, xv in enumerate(xs):
            v = float(fn(xv, yv))
            if not math.isfinite(v):
                raise NonFiniteValueError(
                    f"non-finite value {v!r} at {x_label}={xv!r}, {y_label}={yv!r}",
                    (xv, yv))
            values[j, i] = v
    return GridField(xs, ys, values, x_label, y_label)
