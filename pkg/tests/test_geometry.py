import math

import numpy as np
import pytest

from entroflow.errors import DomainError, NonFiniteValueError, SingularMetricError
from entroflow.gamma import GammaParams, gamma_entropy, gamma_entropy_gradient, gamma_metric_field
from entroflow.geometry import (MetricField, MetricTensor, Trajectory, arc_length, christoffel,
                                flat_metric, geodesic_shoot, gradient_flow, grid_eval)
from entroflow.mckay import M1Point, m1_entropy, m1_entropy_gradient, m1_metric_field
from entroflow.weibull import WeibullParams, weibull_entropy, weibull_entropy_gradient

EG = 0.5772156649015329


def gamma_grad(q):
    return gamma_entropy_gradient(GammaParams(q[0], q[1]))


def m1_grad(q):
    return m1_entropy_gradient(M1Point(q[0], q[1]))


def weibull_grad(q):
    return weibull_entropy_gradient(WeibullParams(q[0], q[1]))


def test_christoffel_flat_is_zero():
    for p in [(1, 1), (3.5, 0.2)]:
        assert np.all(christoffel(flat_metric(), p) == 0)


def test_christoffel_gamma_values():
    gam = christoffel(gamma_metric_field(), (1.0, 1.0))
    assert gam[0, 0, 0] == pytest.approx(-1.0, abs=1e-12)
    assert gam[0, 0, 1] == pytest.approx(0.5, abs=1e-12)
    assert gam[0, 1, 0] == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(gam, np.transpose(gam, (0, 2, 1)), atol=1e-12)


@pytest.mark.parametrize("field", [gamma_metric_field(), m1_metric_field()])
def test_christoffel_exact_vs_finite_differences(field):
    fd = field.with_finite_differences()
    for p in [(1.0, 1.0), (0.6, 2.5), (2.2, 0.8), (4.0, 4.0)]:
        assert np.allclose(christoffel(field, p), christoffel(fd, p), atol=1e-5)


def test_singular_metric():
    field = MetricField.from_matrix(lambda q: np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularMetricError):
        christoffel(field, (1.0, 1.0))


def test_metric_tensor_helpers():
    g = MetricTensor(np.array([[2.0, 0.5], [0.5, 1.0]]))
    assert g.det == pytest.approx(1.75)
    assert g.leading_minors() == pytest.approx([2.0, 1.75])
    assert g.is_positive_definite()
    assert g.norm([1.0, 0.0]) == pytest.approx(math.sqrt(2))
    assert not MetricTensor(np.diag([1.0, -1.0])).is_positive_definite()


def test_flat_geodesic_straight_line():
    tr = geodesic_shoot(flat_metric(), (1, 1), (1, 0), 1.0, 1e-3)
    assert tr.end == pytest.approx([2.0, 1.0], abs=1e-10)
    rng = np.random.default_rng(2)
    for _ in range(5):
        x0 = rng.uniform(1, 3, 2)
        v = rng.uniform(-0.5, 0.5, 2)
        tr = geodesic_shoot(flat_metric(), x0, v, 1.0, 1e-2)
        expected = x0[None, :] + tr.times[:, None] * v[None, :]
        assert np.max(np.abs(tr.points - expected)) <= 1e-10


def _speed(field, tr, i):
    return field(tr.points[i]).norm(tr.velocities[i])


@pytest.mark.parametrize("field", [gamma_metric_field(), m1_metric_field()],
                         ids=["gamma", "mckay-m1"])
def test_geodesic_speed_conservation(field):
    rng = np.random.default_rng(20240611)
    for _ in range(8):
        x0 = rng.uniform(0.5, 3.0, 2)
        v = rng.normal(size=2)
        v /= field(x0).norm(v)
        tr = geodesic_shoot(field, x0, v, 1.0, 1e-3)
        assert not tr.truncated
        s0 = _speed(field, tr, 0)
        drift = max(abs(_speed(field, tr, i) - s0) for i in range(len(tr)))
        assert drift <= 1e-6


def test_gamma_geodesic_unit_speed_from_one_one():
    field = gamma_metric_field()
    for ang in np.linspace(0, 2 * math.pi, 7)[:-1]:
        v = np.array([math.cos(ang), math.sin(ang) / math.sqrt(math.pi**2 / 6 - 1)])
        tr = geodesic_shoot(field, (1, 1), v, 1.0, 1e-3)
        assert _speed(field, tr, 0) == pytest.approx(1.0, abs=1e-12)
        assert _speed(field, tr, -1) == pytest.approx(1.0, abs=1e-6)


def test_rk4_order():
    field = gamma_metric_field()
    start, vel = (1.0, 1.0), (0.6, -0.4)
    ref = geodesic_shoot(field, start, vel, 1.0, 1e-5).end
    e1 = np.linalg.norm(geodesic_shoot(field, start, vel, 1.0, 0.1).end - ref)
    e2 = np.linalg.norm(geodesic_shoot(field, start, vel, 1.0, 0.05).end - ref)
    assert 12 <= e1 / e2 <= 20


@pytest.mark.parametrize("field", [gamma_metric_field(), m1_metric_field()],
                         ids=["gamma", "mckay-m1"])
def test_geodesic_time_reversal(field):
    fwd = geodesic_shoot(field, (1.0, 1.0), (0.5, 0.3), 1.0, 1e-3)
    back = geodesic_shoot(field, fwd.end, -fwd.velocities[-1], 1.0, 1e-3)
    assert back.end == pytest.approx([1.0, 1.0], abs=1e-6)


def test_geodesic_boundary_truncation():
    tr = geodesic_shoot(flat_metric(), (1, 1), (-2, 0), 1.0, 1e-3)
    assert tr.truncated
    assert "boundary" in tr.note
    assert np.all(tr.points > 0)
    assert tr.times[-1] < 0.5


def test_geodesic_validation():
    with pytest.raises(DomainError):
        geodesic_shoot(flat_metric(), (1, 1), (1, 0), 1.0, 0.0)
    with pytest.raises(DomainError):
        geodesic_shoot(flat_metric(), (1, 1), (1, 0), -1.0, 0.1)
    with pytest.raises(DomainError):
        geodesic_shoot(flat_metric(), (-1, 1), (1, 0), 1.0, 0.1)


def _segment(a, b, n):
    pts = np.linspace(a, b, n)
    return Trajectory(np.linspace(0, 1, n), pts)


def test_arc_length():
    assert arc_length(flat_metric(), _segment((1, 1), (2, 1), 2)) == pytest.approx(1.0)
    tr = _segment((1, 1), (2, 1), 2001)
    assert arc_length(gamma_metric_field(), tr) == pytest.approx(math.log(2), abs=1e-7)
    assert arc_length(gamma_metric_field(), tr.reversed()) == pytest.approx(
        arc_length(gamma_metric_field(), tr), abs=1e-12)
    same = Trajectory(np.array([0.0, 1.0]), np.array([[1.0, 1.0], [1.0, 1.0]]))
    assert arc_length(gamma_metric_field(), same) == 0.0
    with pytest.raises(DomainError):
        arc_length(flat_metric(), Trajectory(np.array([0.0]), np.array([[1.0, 1.0]])))


def test_arc_length_additive():
    field = m1_metric_field()
    tr = geodesic_shoot(field, (1, 1), (0.4, 0.2), 1.0, 1e-2)
    k = 40
    a = Trajectory(tr.times[: k + 1], tr.points[: k + 1])
    b = Trajectory(tr.times[k:], tr.points[k:])
    assert arc_length(field, tr) == pytest.approx(arc_length(field, a) + arc_length(field, b),
                                                  abs=1e-12)
    # unit-speed geodesic has length equal to its parameter span
    v = np.array([0.4, 0.2])
    v /= field((1, 1)).norm(v)
    tr = geodesic_shoot(field, (1, 1), v, 1.0, 1e-3)
    assert arc_length(field, tr) == pytest.approx(1.0, abs=1e-5)


def test_zero_gradient_flow_is_constant():
    tr = gradient_flow(lambda q: np.zeros(2), (1.5, 2.5), 1.0, 0.1)
    assert np.all(tr.points == np.array([1.5, 2.5]))
    assert len(tr) == 11


def test_gamma_flow_exact_solution():
    tr = gradient_flow(gamma_grad, (1.0, 1.0), 1.5, 1e-3)
    assert np.all(tr.points[:, 1] == 1.0)
    assert np.max(np.abs(tr.points[:, 0] ** 2 - 1 - 2 * tr.times)) <= 1e-6
    assert tr.end[0] == pytest.approx(2.0, abs=1e-5)


def test_weibull_flow_exact_solution():
    tr = gradient_flow(weibull_grad, (1.0, EG), 1.5, 1e-3)
    assert np.max(np.abs(tr.points[:, 1] - EG)) <= 1e-9
    assert np.max(np.abs(tr.points[:, 0] ** 2 - 1 - 2 * tr.times)) <= 1e-6


def _nondecreasing(vals, tol=1e-9):
    return all(b >= a - tol for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("k0", [0.3, 3.0, 8.0])
def test_gamma_flow_kappa_approaches_one(k0):
    tr = gradient_flow(gamma_grad, (1.0, k0), 10.0, 1e-2)
    dist = np.abs(tr.points[:, 1] - 1.0)
    assert dist[-1] < dist[0]
    assert np.all(np.diff(dist) <= 1e-12)
    s = [gamma_entropy(GammaParams(*p)) for p in tr.points]
    assert _nondecreasing(s)


@pytest.mark.parametrize("b0", [0.2, 0.5, 0.7, 2.0, 5.0])
def test_weibull_flow_beta_approaches_gamma(b0):
    tr = gradient_flow(weibull_grad, (1.0, b0), 10.0, 1e-2)
    dist = np.abs(tr.points[:, 1] - EG)
    assert dist[-1] < dist[0]
    assert np.all(np.diff(dist) <= 1e-12)
    assert np.all(np.sign(tr.points[:, 1] - EG) == np.sign(b0 - EG))
    s = [weibull_entropy(WeibullParams(*p)) for p in tr.points]
    assert _nondecreasing(s)


@pytest.mark.parametrize("start", [(1.0, 1.0), (0.5, 2.0), (2.0, 0.5)])
def test_m1_flow_entropy_nondecreasing(start):
    tr = gradient_flow(m1_grad, start, 0.3, 1e-3)
    s = [m1_entropy(M1Point(*p)) for p in tr.points]
    assert _nondecreasing(s)


def test_flow_truncates_at_bounds():
    tr = gradient_flow(lambda q: np.array([-1.0, 0.0]), (1.0, 1.0), 5.0, 1e-2)
    assert tr.truncated
    assert np.all(tr.points[:, 0] > 1e-8)


def test_flow_errors():
    with pytest.raises(DomainError):
        gradient_flow(gamma_grad, (1.0, 1.0), 1.0, -0.1)
    with pytest.raises(NonFiniteValueError):
        gradient_flow(lambda q: np.array([math.nan, 0.0]), (1.0, 1.0), 1.0, 0.1)


def test_grid_eval():
    g = grid_eval(lambda x, y: 1.0, (0, 1, 4), (2, 3, 3))
    assert g.values.shape == (3, 4)
    assert np.all(g.values == 1.0)
    g = grid_eval(lambda m, k: gamma_entropy(GammaParams(m, k)), (1, math.e, 11), (1, 2, 2))
    assert g.values[0] == pytest.approx(1 + np.log(g.x), abs=1e-12)
    assert g.values[0, 0] == pytest.approx(1.0) and g.values[0, -1] == pytest.approx(2.0)
    g = grid_eval(lambda c, a: m1_entropy(M1Point(c, a)), (0.5, 2, 3), (0.5, 2, 3))
    for j, a in enumerate(g.y):
        for i, c in enumerate(g.x):
            assert g.values[j, i] == m1_entropy(M1Point(c, a))


def test_grid_eval_errors():
    with pytest.raises(DomainError):
        grid_eval(lambda x, y: 0.0, (1, 1, 2), (0, 1, 2))
    with pytest.raises(DomainError):
        grid_eval(lambda x, y: 0.0, (0, 1, 1), (0, 1, 2))
    with pytest.raises(NonFiniteValueError) as exc:
        grid_eval(lambda x, y: math.inf if x > 0.5 else 0.0, (0, 1, 3), (0, 1, 2))
    assert exc.value.point == (1.0, 0.0)
