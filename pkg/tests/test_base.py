import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liftgeo import base
from liftgeo.base import (BaseGeometry, ChartDomain, ExplicitConnection, MetricField, Probe, VectorFieldBase,
                          levi_civita)
from liftgeo.definitions import BUILTINS, builtin
from liftgeo.errors import NonPositiveWeight, ValidationError
from liftgeo.expr import parse

POLAR = MetricField.diagonal(["1", "x0^2"])
SPHERE = MetricField.diagonal(["1", "sin(x0)^2"])
FLAT2 = MetricField.diagonal(["1", "1"])
H = 1e-5


def _fd_christoffel(g: MetricField, x):
    """Koszul formula with metric derivatives by central differences of point values."""
    x = np.asarray(x, float)
    n = len(x)
    dg = np.empty((n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = H
        dg[i] = (g.at(x + e) - g.at(x - e)) / (2 * H)
    ginv = np.linalg.inv(g.at(x))
    return 0.5 * np.einsum("kl,ijl->kij", ginv, dg.transpose(0, 1, 2) + dg.transpose(1, 0, 2)
                           - np.einsum("lij->ijl", dg))


def _fd_riemann(conn, x):
    x = np.asarray(x, float)
    n = len(x)
    G = conn.coefficients(x)
    dG = np.empty((n, n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = H
        dG[i] = (conn.coefficients(x + e) - conn.coefficients(x - e)) / (2 * H)
    # R^l_ijk = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
    return (np.einsum("iljk->lijk", dG) - np.einsum("jlik->lijk", dG)
            + np.einsum("lim,mjk->lijk", G, G) - np.einsum("ljm,mik->lijk", G, G))


def _points(chart, count, seed=0):
    return chart.sample(np.random.default_rng(seed), count)


# --- levi_civita ----------------------------------------------------------------

def test_flat_christoffels_vanish():
    assert np.all(levi_civita(FLAT2).coefficients([0.3, -0.7]) == 0.0)


def test_polar_christoffels_closed_form_and_koszul_oracle():
    for x in _points(ChartDomain(((0.3, 3.0), (-3.0, 3.0))), 20):
        G = levi_civita(POLAR).coefficients(x)
        assert G[0, 1, 1] == pytest.approx(-x[0], abs=1e-12)
        assert G[1, 0, 1] == pytest.approx(1 / x[0], abs=1e-12)
        np.testing.assert_allclose(G, _fd_christoffel(POLAR, x), atol=1e-6)


def test_sphere_christoffel_and_koszul_oracle():
    for x in _points(ChartDomain(((0.2, 2.9), (-3.0, 3.0))), 20):
        G = levi_civita(SPHERE).coefficients(x)
        assert G[0, 1, 1] == pytest.approx(-math.sin(x[0]) * math.cos(x[0]), abs=1e-12)
        np.testing.assert_allclose(G, _fd_christoffel(SPHERE, x), atol=1e-6)


# --- curvature, torsion, cubic ---------------------------------------------------

def test_flat_and_polar_curvature_vanish():
    assert np.all(base.curvature(ExplicitConnection.zero(2), [0.1, 0.2]).components == 0.0)
    for x in _points(ChartDomain(((0.3, 3.0), (-3.0, 3.0))), 10):
        R = base.curvature(levi_civita(POLAR), x).components
        assert np.abs(R).max() < 1e-12
        assert np.abs(_fd_riemann(levi_civita(POLAR), x)).max() < 1e-6


def test_sphere_lowered_curvature_at_equator():
    val = base.curvature(levi_civita(SPHERE), [math.pi / 2, 0.4], SPHERE)
    # K = 1 and g = I at the equator: R(∂0,∂1)∂1 = ∂0 and R(∂0,∂1)∂0 = -∂1
    assert val.components[0, 0, 1, 1] == pytest.approx(1.0, abs=1e-12)
    assert val.lowered[0, 1, 0, 1] == pytest.approx(-1.0, abs=1e-12)
    assert val.lowered[0, 1, 1, 0] == pytest.approx(1.0, abs=1e-12)
    assert val.sectional(SPHERE.at([math.pi / 2, 0.4]), np.array([1.0, 0]), np.array([0, 1.0])) == pytest.approx(1.0)


def test_sphere_curvature_matches_fd_oracle():
    for x in _points(ChartDomain(((0.2, 2.9), (-3.0, 3.0))), 10, seed=3):
        np.testing.assert_allclose(base.curvature(levi_civita(SPHERE), x).components,
                                   _fd_riemann(levi_civita(SPHERE), x), atol=1e-6)


def test_sectional_curvature_of_sphere_is_one_everywhere():
    for x in _points(ChartDomain(((0.2, 2.9), (-3.0, 3.0))), 10):
        val = base.curvature(levi_civita(SPHERE), x, SPHERE)
        assert val.sectional(SPHERE.at(x), np.array([1.0, 0.3]), np.array([-0.2, 1.0])) == pytest.approx(1.0, abs=1e-10)


def test_torsion_examples():
    coeffs = np.zeros((2, 2, 2), dtype=object)
    coeffs[0, 0, 1] = 1.0
    T = base.torsion(ExplicitConnection(coeffs), [0.0, 0.0])
    assert T[0, 0, 1] == 1.0 and T[0, 1, 0] == -1.0
    assert np.abs(base.torsion(levi_civita(SPHERE), [1.0, 0.5])).max() == 0.0
    sym = np.zeros((2, 2, 2), dtype=object)
    sym[1, 0, 1] = sym[1, 1, 0] = "x0*x1"
    assert np.abs(base.torsion(ExplicitConnection(sym, True), [0.3, 0.9])).max() == 0.0


def test_cubic_tensor_examples():
    assert np.abs(base.cubic_tensor(SPHERE, levi_civita(SPHERE), [1.1, 0.2]).components).max() < 1e-14
    c = np.zeros((2, 2, 2), dtype=object)
    c[0, 0, 0] = 0.7
    assert base.cubic_tensor(FLAT2, ExplicitConnection(c), [0.5, 0.5]).components[0, 0, 0] == pytest.approx(-1.4)
    g = MetricField.diagonal(["exp(2*x0)", "1"])
    assert base.cubic_tensor(g, ExplicitConnection.zero(2), [0.0, 0.0]).components[0, 0, 0] == pytest.approx(2.0)


def test_codazzi_examples():
    pts = _points(ChartDomain(((0.2, 2.9), (-3.0, 3.0))), 10)
    rep = base.is_codazzi(SPHERE, levi_civita(SPHERE), pts)
    assert rep.passed and rep.max_residual < 1e-15
    rep = base.is_codazzi(SPHERE, ExplicitConnection.zero(2), [[math.pi / 4, 0.0]])
    C = base.cubic_tensor(SPHERE, ExplicitConnection.zero(2), [math.pi / 4, 0.0]).components
    assert C[0, 1, 1] == pytest.approx(1.0) and C[1, 1, 0] == 0.0
    assert not rep.passed


def test_codazzi_brute_force_symmetrization_oracle():
    c = np.zeros((2, 2, 2), dtype=object)
    c[0, 0, 1] = c[0, 1, 0] = 1.0
    C = base.cubic_tensor(FLAT2, ExplicitConnection(c, True), [0.0, 0.0]).components
    # C_ijk = -Γ^r_ij g_rk - Γ^r_ik g_jr
    brute = np.zeros((2, 2, 2))
    G = np.zeros((2, 2, 2))
    G[0, 0, 1] = G[0, 1, 0] = 1.0
    for i in range(2):
        for j in range(2):
            for k in range(2):
                brute[i, j, k] = -G[k, i, j] - G[j, i, k]
    np.testing.assert_array_equal(C, brute)
    assert C[0, 1, 0] == -1.0 and C[0, 0, 1] == -1.0 and C[1, 0, 0] == -2.0
    worst = max(abs(C[i, j, k] - C[j, k, i]) for i in range(2) for j in range(2) for k in range(2))
    rep = base.is_codazzi(FLAT2, ExplicitConnection(c, True), [[0.0, 0.0]])
    assert rep.max_residual == worst == 1.0 and not rep.passed


# --- Lie derivatives -------------------------------------------------------------

def _fd_lie_metric(X: VectorFieldBase, g: MetricField, x):
    x = np.asarray(x, float)
    n = len(x)
    dX, dg = np.empty((n, n)), np.empty((n, n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = H
        dX[i] = (X.at(x + e) - X.at(x - e)) / (2 * H)
        dg[i] = (g.at(x + e) - g.at(x - e)) / (2 * H)
    G = g.at(x)
    return np.einsum("k,kij->ij", X.at(x), dg) + G @ dX.T + dX @ G


def test_lie_derivative_metric_examples():
    rot = VectorFieldBase(["-x1", "x0"])
    assert np.abs(base.lie_derivative_metric(rot, FLAT2, [0.4, -1.1])).max() == 0.0
    dil = VectorFieldBase(["x0"])
    assert base.lie_derivative_metric(dil, MetricField([["1"]]), [0.3])[0, 0] == 2.0
    assert np.abs(base.lie_derivative_metric(VectorFieldBase(["0", "0"]), SPHERE, [1.0, 0.0])).max() == 0.0
    X = VectorFieldBase(["sin(x1)", "x0*x1"])
    for x in _points(ChartDomain(((0.2, 2.9), (-3.0, 3.0))), 5):
        np.testing.assert_allclose(base.lie_derivative_metric(X, SPHERE, x), _fd_lie_metric(X, SPHERE, x),
                                   atol=1e-6)


def test_lie_derivative_connection_examples():
    flat = ExplicitConnection.zero(2)
    assert np.abs(base.lie_derivative_connection(VectorFieldBase(["1", "2"]), flat, [0.1, 0.2])).max() == 0.0
    lin = VectorFieldBase(["2*x0 - x1", "0.5*x0 + 3*x1"])
    assert np.abs(base.lie_derivative_connection(lin, flat, [0.7, -0.4])).max() == 0.0
    quad = VectorFieldBase(["x0^2"])
    assert base.lie_derivative_connection(quad, ExplicitConnection.zero(1), [0.3])[0, 0, 0] == 2.0


def test_sphere_rotation_is_killing_and_affine():
    rot = VectorFieldBase(["0", "1"])
    for x in _points(ChartDomain(((0.2, 2.9), (-3.0, 3.0))), 5):
        assert np.abs(base.lie_derivative_metric(rot, SPHERE, x)).max() < 1e-14
        assert np.abs(base.lie_derivative_connection(rot, levi_civita(SPHERE), x)).max() < 1e-12


# --- gradient and A_f ------------------------------------------------------------

def test_gradient_examples():
    np.testing.assert_array_equal(base.gradient(FLAT2, parse("x0", 2), [0.2, 0.1]), [1.0, 0.0])
    np.testing.assert_allclose(base.gradient(MetricField.diagonal(["4", "1"]), parse("x0", 2), [0, 0]), [0.25, 0])
    x0 = 0.8
    np.testing.assert_allclose(base.gradient(SPHERE, parse("x1", 2), [x0, 0.0]), [0, 1 / math.sin(x0) ** 2])


def test_a_f_examples():
    assert np.all(base.a_f(SPHERE, parse("3", 2), [1.0, 0.0], [1, 2], [0.5, -1]) == 0.0)
    np.testing.assert_allclose(base.a_f(FLAT2, parse("x0 + 2", 2), [0, 0], [1, 0], [1, 0]), [0.25, 0.0])
    with pytest.raises(NonPositiveWeight):
        base.a_f(FLAT2, parse("x0 - 2", 2), [0, 0], [1, 0], [1, 0])


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4),
       st.floats(0.3, 2.8), st.floats(-2.5, 2.5))
def test_a_f_is_symmetric(xy, a, b):
    X, Y = np.array(xy[:2]), np.array(xy[2:])
    f = parse("x0 + 2 + 0.3*sin(x1)", 2)
    np.testing.assert_allclose(base.a_f(SPHERE, f, [a, b], X, Y), base.a_f(SPHERE, f, [a, b], Y, X),
                               atol=1e-14)


@given(st.floats(0.3, 2.8), st.floats(-2.5, 2.5), st.floats(-2, 2), st.floats(-2, 2))
def test_gradient_pairs_with_metric_to_directional_derivative(a, b, y0, y1):
    phi = parse("x0*cos(x1) + x1^2", 2)
    geo = BaseGeometry(SPHERE)
    probe = Probe([a, b], order=1)
    grad = geo.gradient(phi, probe).value
    dphi = geo.dscalar(phi, probe).value
    Y = np.array([y0, y1])
    assert abs(grad @ SPHERE.at([a, b]) @ Y - dphi @ Y) < 1e-10 * max(1, np.abs(dphi).max())


# --- invariants over every built-in ------------------------------------------------

@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_invariants(name):
    d = builtin(name)
    lc = levi_civita(d.metric)
    geo = BaseGeometry(d.metric, lc)
    for x in _points(d.chart, 50 if name != "euclidean3" else 20, seed=7):
        probe = Probe(x, order=3)
        assert np.abs(geo.cubic(probe).value).max() < 1e-10
        R = geo.riemann(probe).value
        bianchi = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
        assert np.abs(bianchi).max() < 1e-9
        assert np.abs(R + R.transpose(0, 2, 1, 3)).max() < 1e-9
        L = geo.riemann_lowered(probe).value
        assert np.abs(L + L.transpose(1, 0, 2, 3)).max() < 1e-9
        assert np.abs(L + L.transpose(0, 1, 3, 2)).max() < 1e-9
    assert base.is_codazzi(d.metric, lc, _points(d.chart, 10)).passed


def test_metric_must_be_symmetric_and_square():
    with pytest.raises(ValidationError):
        MetricField([["1", "x0"], ["0", "1"]])
    with pytest.raises(ValidationError):
        MetricField([["1", "0"]])


def test_metric_validation_detects_indefinite():
    with pytest.raises(ValidationError, match="positive-definite"):
        MetricField.diagonal(["-1", "1"]).validate([[0.0, 0.0]])


def test_curvature_sign_flag_flips_riemann_only():
    plus = BaseGeometry(SPHERE, curvature_sign=1)
    minus = BaseGeometry(SPHERE, curvature_sign=-1)
    p1, p2 = Probe([1.0, 0.2], order=2), Probe([1.0, 0.2], order=2)
    np.testing.assert_array_equal(plus.riemann(p1).value, -minus.riemann(p2).value)
    np.testing.assert_array_equal(plus.gamma(p1).value, minus.gamma(p2).value)
