import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfgraphs import jets
from hopfgraphs.jets import Jet

ORDER = 4
t = sp.Symbol("t")


def sympy_derivatives(expr, x0, order=ORDER):
    """Derivatives of expr(x0 + t) at t = 0, computed symbolically."""
    e = expr.subs(sp.Symbol("x"), x0 + t)
    return [float(sp.diff(e, t, n).subs(t, 0)) for n in range(order + 1)]


X = sp.Symbol("x")
CASES = [
    (lambda j: jets.exp(j), sp.exp(X), 0.3),
    (lambda j: jets.log(j), sp.log(X), 1.7),
    (lambda j: jets.sin(j), sp.sin(X), 0.9),
    (lambda j: jets.cos(j), sp.cos(X), -0.4),
    (lambda j: jets.tan(j), sp.tan(X), 0.6),
    (lambda j: jets.sqrt(j), sp.sqrt(X), 2.5),
    (lambda j: jets.arctan(j), sp.atan(X), 0.8),
    (lambda j: 1.0 / (1.0 + j * j), 1 / (1 + X**2), 0.5),
    (lambda j: j**5 - 3 * j**2, X**5 - 3 * X**2, 1.3),
    (lambda j: j ** (-3), X ** (-3), 1.1),
    (lambda j: jets.exp(jets.sin(j)) * jets.sqrt(1 + j * j), sp.exp(sp.sin(X)) * sp.sqrt(1 + X**2), 0.2),
]


@pytest.mark.parametrize("fn, expr, x0", CASES)
def test_elementary_functions_match_symbolic_derivatives(fn, expr, x0):
    got = fn(Jet.variable(x0, 1.0, ORDER))
    want = sympy_derivatives(expr, x0)
    np.testing.assert_allclose([got.derivative(n) for n in range(ORDER + 1)], want, rtol=1e-12, atol=1e-12)


def test_arctan2_matches_angle_derivatives():
    # theta(t) = arctan2(sin(w t + a), cos(w t + a)) = w t + a for |a| < pi
    y = Jet.variable(0.0, 1.0, 3)
    a, w = 0.7, 1.9
    theta = jets.arctan2(jets.sin(w * y + a), jets.cos(w * y + a))
    assert theta.value == pytest.approx(a)
    assert theta.derivative(1) == pytest.approx(w)
    assert abs(theta.derivative(2)) < 1e-13


def test_vector_jets_broadcast_over_value_shape():
    x = Jet.variable(np.array([0.1, 0.2, 0.3]), np.array([1.0, 0.0, 2.0]), 2)
    y = jets.sin(x) * x[..., 0]
    assert y.shape == (3,)
    # d/dt [sin(x_i + t d_i) (x_0 + t)] at 0
    expected = np.cos([0.1, 0.2, 0.3]) * np.array([1.0, 0.0, 2.0]) * 0.1 + np.sin([0.1, 0.2, 0.3])
    np.testing.assert_allclose(y.derivative(1), expected, rtol=1e-14)


def test_complex_variable_keeps_imaginary_part():
    z = Jet.variable(1 + 2j, 1j, 2)
    w = z * z
    assert w.derivative(1) == pytest.approx(2 * (1 + 2j) * 1j)
    assert w.derivative(2) == pytest.approx(2 * (1j) ** 2)


def test_compose_applies_chain_rule():
    x = Jet.variable(0.5, 2.0, 2)
    # g(u) = u^3 with derivatives (u^3, 3u^2, 6u) at u = 0.5
    y = jets.compose(x, [0.125, 0.75, 3.0])
    assert y.derivative(1) == pytest.approx(0.75 * 2.0)
    assert y.derivative(2) == pytest.approx(3.0 * 4.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
def test_quotient_and_product_rules(a, b, c):
    x = Jet.variable(c, 1.0, 3)
    f = (a * x + b) / (x * x + 1.0)
    g = (a * x + b) * jets.reciprocal(x * x + 1.0)
    np.testing.assert_allclose(f.c, g.c, rtol=1e-12, atol=1e-12)
    h = 1e-5
    fd = ((a * (c + h) + b) / ((c + h) ** 2 + 1) - (a * (c - h) + b) / ((c - h) ** 2 + 1)) / (2 * h)
    assert f.derivative(1) == pytest.approx(fd, rel=1e-7, abs=1e-8)


def test_jet_needs_coefficients():
    with pytest.raises(ValueError):
        Jet(np.float64(1.0))
