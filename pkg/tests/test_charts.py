import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfgraphs.charts import (
    GUARD,
    HopfChart3,
    PolarChart2,
    SpherePoint,
    TangentVector,
    ambient_to_chart,
    chart_to_ambient,
    directional_derivative,
    great_circle_jet,
    s3_connection,
    s3_frame,
    sample_chart_points,
    sample_sphere,
    tangent_basis,
)
from hopfgraphs.errors import ChartDegenerate, NumericalBreakdown

angles = st.floats(0.0, 2 * np.pi - 1e-9)
interior_s = st.floats(GUARD * 2, np.pi / 2 - GUARD * 2)


def test_sphere_point_rejects_off_sphere_coordinates():
    SpherePoint(np.array([0.6, 0.8, 0.0]))
    with pytest.raises(ValueError):
        SpherePoint(np.array([0.6, 0.81, 0.0]))
    with pytest.raises(ValueError):
        SpherePoint(np.array([0.0, 0.0]), radius=0.0)


def test_tangent_vector_must_be_orthogonal():
    p = SpherePoint(np.array([1.0, 0.0, 0.0]))
    TangentVector(p, np.array([0.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        TangentVector(p, np.array([0.1, 1.0, 0.0]))


@settings(max_examples=60, deadline=None)
@given(angles, angles, interior_s)
def test_hopf_chart_round_trip(xi, eta, s):
    p = chart_to_ambient(HopfChart3(xi, eta, s))
    c = ambient_to_chart(p)
    assert np.linalg.norm(p.coords) == pytest.approx(1.0)
    assert (c.s, np.cos(c.xi), np.sin(c.xi), np.cos(c.eta), np.sin(c.eta)) == pytest.approx((s, np.cos(xi), np.sin(xi), np.cos(eta), np.sin(eta)), abs=1e-12)


def test_polar_chart_round_trip():
    c = PolarChart2(1.2, 0.7, radius=0.5)
    back = ambient_to_chart(chart_to_ambient(c), polar=True)
    assert (back.sigma, back.a, back.radius) == pytest.approx((1.2, 0.7, 0.5))


@settings(max_examples=40, deadline=None)
@given(angles, angles, interior_s)
def test_s3_frame_is_orthonormal_and_tangent(xi, eta, s):
    c = HopfChart3(xi, eta, s)
    v = s3_frame(c)
    p = chart_to_ambient(c).coords
    np.testing.assert_allclose(v @ v.T, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(v @ p, 0.0, atol=1e-14)


def test_s3_frame_matches_chart_partials():
    c = HopfChart3(0.3, 1.1, 0.6)
    h = 1e-6

    def P(xi, eta, s):
        return chart_to_ambient(HopfChart3(xi, eta, s)).coords

    v = s3_frame(c)
    d_xi = (P(c.xi + h, c.eta, c.s) - P(c.xi - h, c.eta, c.s)) / (2 * h)
    d_s = (P(c.xi, c.eta, c.s + h) - P(c.xi, c.eta, c.s - h)) / (2 * h)
    np.testing.assert_allclose(v[0], d_xi / np.sin(c.s), atol=1e-9)
    np.testing.assert_allclose(v[2], d_s, atol=1e-9)


def test_s3_connection_matches_differentiated_frame():
    c = HopfChart3(0.4, 2.0, 0.9)
    p = chart_to_ambient(c).coords
    v = s3_frame(c)
    table = s3_connection(c).coefficients

    def frame_at(x):
        return s3_frame(ambient_to_chart(x))

    for i in range(3):
        dv = directional_derivative(frame_at, p, v[i])
        measured = dv @ v.T  # [j, k] = <D_{v_i} v_j, v_k>
        np.testing.assert_allclose(measured, table[i], atol=1e-8)
    assert s3_connection(c).is_skew(1e-15)


def test_frame_refuses_points_near_chart_singularities():
    with pytest.raises(ChartDegenerate):
        s3_frame(HopfChart3(0.0, 0.0, GUARD / 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10_000))
def test_tangent_basis_is_orthonormal_and_deterministic(dim, seed):
    p = sample_sphere(np.random.default_rng(seed), dim, 1)[0]
    T = tangent_basis(p)
    assert T.shape == (dim, dim + 1)
    np.testing.assert_allclose(T @ T.T, np.eye(dim), atol=1e-13)
    np.testing.assert_allclose(T @ p, 0.0, atol=1e-13)
    np.testing.assert_array_equal(T, tangent_basis(p.copy()))


def test_great_circle_backends_agree_on_a_smooth_function():
    def f(x):
        return x[..., 0] * x[..., 1] + x[..., 2] ** 3

    p = np.array([0.5, 0.5, 0.5, 0.5])
    v = np.array([0.5, -0.5, 0.5, -0.5])
    d1j, d2j = great_circle_jet(f, p, v, backend="jet")
    d1f, d2f = great_circle_jet(f, p, v, backend="fd")
    # closed form along gamma(t) = cos t p + sin t v
    assert d1j == pytest.approx(0.0 + 3 * 0.25 * 0.5, abs=1e-14)
    assert (d1f, d2f) == pytest.approx((d1j, d2j), abs=1e-8)


def test_fd_backend_flags_disagreeing_step_sizes():
    def rough(x):
        return np.abs(x[..., 1])  # kink on the great circle at t = 0

    with pytest.raises(NumericalBreakdown):
        great_circle_jet(rough, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), backend="fd")
    with pytest.raises(ValueError):
        great_circle_jet(rough, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), backend="nope")


def test_directional_derivative_scales_with_speed_and_handles_containers():
    p = np.array([0.0, 0.0, 1.0])
    v = np.array([2.0, 0.0, 0.0])

    def F(x):
        return {"a": x[0], "b": (x[2], x)}

    d = directional_derivative(F, p, v)
    assert d["a"] == pytest.approx(2.0, abs=1e-10)
    assert d["b"][0] == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(d["b"][1], v, atol=1e-10)


def test_chart_samples_stay_in_guard_band(rng):
    pts = sample_chart_points(rng, 500)
    s = np.array([ambient_to_chart(p).s for p in pts])
    assert np.all((s >= GUARD - 1e-12) & (s <= np.pi / 2 - GUARD + 1e-12))
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
