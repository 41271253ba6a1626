import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hopfgraphs.charts import sample_sphere
from hopfgraphs.graphcore import analyze, singular_decompose
from hopfgraphs.hopfmodels import (
    OCTONION_TABLE,
    QUATERNION_TABLE,
    HopfComplex,
    HopfComposedMoebius,
    HopfOctonionic,
    HopfQuaternionic,
    MoebiusMap,
    Octonion,
    Quaternion,
    _chart_of,
    _lambda_affine,
    _stereo,
    _stereo_south,
    associator,
    composed_invariant_check,
    hopf_variant,
    horizontal_frame,
    invariant_scan,
    left_multiplication_frame,
    moebius_conformal_factor,
    octonion_mul,
    parse_complex,
    quaternion_mul,
)

finite = st.floats(-3, 3, allow_nan=False)
oct_vec = arrays(np.float64, 8, elements=finite)
quat_vec = arrays(np.float64, 4, elements=finite)


def hamilton(p, q):
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return np.array(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ]
    )


@settings(max_examples=50, deadline=None)
@given(quat_vec, quat_vec)
def test_quaternion_product_is_hamiltons(p, q):
    np.testing.assert_allclose(quaternion_mul(p, q), hamilton(p, q), atol=1e-12)
    assert (Quaternion(p) * Quaternion(q)).coeffs == pytest.approx(hamilton(p, q), abs=1e-12)


@pytest.mark.parametrize("i", range(1, 8))
def test_imaginary_octonion_units_square_to_minus_one(i):
    e = Octonion.basis(i)
    np.testing.assert_array_equal((e * e).coeffs, -Octonion.basis(0).coeffs)


@settings(max_examples=100, deadline=None)
@given(oct_vec, oct_vec)
def test_octonion_norm_is_multiplicative(x, y):
    prod = Octonion(x) * Octonion(y)
    assert prod.norm() == pytest.approx(Octonion(x).norm() * Octonion(y).norm(), rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(oct_vec, oct_vec)
def test_octonions_are_alternative_and_conjugation_reverses_products(x, y):
    np.testing.assert_allclose(associator(x, x, y, OCTONION_TABLE), 0.0, atol=1e-10)
    np.testing.assert_allclose(associator(x, y, y, OCTONION_TABLE), 0.0, atol=1e-10)
    np.testing.assert_allclose(associator(x, y, x, OCTONION_TABLE), 0.0, atol=1e-10)
    lhs = (Octonion(x) * Octonion(y)).conj()
    rhs = Octonion(y).conj() * Octonion(x).conj()
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-10)


def test_octonions_are_not_associative_but_quaternions_are():
    e = [Octonion.basis(i).coeffs for i in range(8)]
    assert np.linalg.norm(associator(e[1], e[2], e[4], OCTONION_TABLE)) == pytest.approx(2.0)
    q = np.random.default_rng(0).standard_normal((3, 4))
    np.testing.assert_allclose(associator(*q, QUATERNION_TABLE), 0.0, atol=1e-12)
    assert np.allclose(octonion_mul(Octonion(e[1]), Octonion(e[2])).coeffs, e[3])


def test_algebra_rejects_wrong_length():
    with pytest.raises(ValueError):
        Octonion(np.zeros(4))


@pytest.mark.parametrize("f, radius", [(HopfComplex(1.0), 1.0), (HopfComplex(), 0.5), (HopfQuaternionic(), 0.5), (HopfOctonionic(), 0.5)])
def test_hopf_maps_land_on_their_target_sphere(f, radius, rng):
    pts = sample_sphere(rng, f.source_dim, 20)
    np.testing.assert_allclose(np.linalg.norm(f(pts), axis=1), radius, rtol=1e-14)


def test_complex_hopf_is_constant_on_circle_fibres(rng):
    f = HopfComplex()
    p = sample_sphere(rng, 3, 1)[0]
    z = np.array([p[0] + 1j * p[1], p[2] + 1j * p[3]]) * np.exp(0.8j)
    q = np.array([z[0].real, z[0].imag, z[1].real, z[1].imag])
    np.testing.assert_allclose(f(q), f(p), atol=1e-15)


def test_quaternionic_hopf_is_invariant_under_left_unit_multiplication(rng):
    f = HopfQuaternionic()
    p = sample_sphere(rng, 7, 1)[0]
    g = sample_sphere(rng, 3, 1)[0]
    q = np.concatenate([hamilton(g, p[:4]), hamilton(g, p[4:])])
    np.testing.assert_allclose(f(q), f(p), atol=1e-14)


def test_octonionic_fibres_are_the_sets_a_times_m(rng):
    # conj(u) v fixes the fibre {(a, a m) : |a| = |u|} with m = u^{-1} v
    f = HopfOctonionic()
    p = sample_sphere(rng, 15, 1)[0]
    u, v = p[:8], p[8:]
    m = octonion_mul(np.array([1, -1, -1, -1, -1, -1, -1, -1]) * u, v) / (u @ u)
    a = sample_sphere(rng, 7, 1)[0] * np.linalg.norm(u)
    q = np.concatenate([a, octonion_mul(a, m)])
    np.testing.assert_allclose(f(q), f(p), atol=1e-13)


@pytest.mark.parametrize("f", [HopfComplex(), HopfQuaternionic(), HopfOctonionic()])
def test_hopf_fibrations_are_riemannian_submersions(f, rng):
    p = sample_sphere(rng, f.source_dim, 1)[0]
    d = singular_decompose(f, p)
    n = f.target_dim
    np.testing.assert_allclose(d.sigma[-n:], 1.0, atol=1e-12)
    np.testing.assert_allclose(d.sigma[:-n], 0.0, atol=1e-12)


def test_left_multiplication_frame_is_vertical_for_quaternions(rng):
    f = HopfQuaternionic()
    p = sample_sphere(rng, 7, 1)[0]
    Z = left_multiplication_frame(p, QUATERNION_TABLE)
    d = singular_decompose(f, p)
    np.testing.assert_allclose(d.df @ Z.T, 0.0, atol=1e-13)
    H = horizontal_frame(p, Z)
    assert H.shape == (4, 8)
    np.testing.assert_allclose(H @ H.T, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(H @ Z.T, 0.0, atol=1e-12)


@pytest.mark.parametrize("name, expected", [("complex", 1.0), ("quaternionic", 6.0), ("octonionic", 28.0)])
def test_norm_of_second_fundamental_form(name, expected, rng):
    stats = invariant_scan(hopf_variant(name), 10, expected, rng)
    assert stats.max_deviation < 1e-10
    assert stats.max_normH < 1e-12


def test_hopf_variant_rejects_unknown_names():
    with pytest.raises(ValueError):
        hopf_variant("real")


@pytest.mark.parametrize("text, value", [("2", 2), ("-1.5i", -1.5j), ("0.5-2i", 0.5 - 2j), ("1+1i", 1 + 1j)])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_moebius_parsing_and_validation():
    m = MoebiusMap.from_string("1+1i,0.5,-0.3i,2")
    assert m.m[0, 0] == 1 + 1j and m.m[1, 0] == -0.3j
    with pytest.raises(ValueError):
        MoebiusMap.from_string("1,2,3")
    with pytest.raises(ValueError):
        MoebiusMap.from_string("1,2,2,4")
    assert MoebiusMap.from_string("0,1,-1,0").is_unitary()
    assert not MoebiusMap.dilation(3.0).is_unitary()
    assert MoebiusMap.dilation(4.0).apply(0.5 + 1j) == pytest.approx(2 + 4j)


def test_stereographic_charts_agree_on_conformal_factor():
    m = MoebiusMap.from_string("1+1i,0.5,-0.3i,2").m
    q = np.array([0.3, -0.4, 0.2])
    q = q / np.linalg.norm(q)
    north = _lambda_affine(m, _stereo(q))
    south = _lambda_affine(m[:, ::-1], _stereo_south(q))
    assert north == pytest.approx(south, rel=1e-13)
    assert _chart_of(np.array([0.0, 0.0, 1.0]))[1] == "south"


@pytest.mark.parametrize("text", ["2,0,0,1", "1+1i,0.5,-0.3i,2", "1,-1i,0.7,1+0.5i"])
def test_composition_is_weakly_conformal_with_the_moebius_factor(text, rng):
    m = MoebiusMap.from_string(text)
    G = HopfComposedMoebius(m)
    hopf = HopfComplex()
    for p in sample_sphere(rng, 3, 10):
        d, _, forms = analyze(G, p)
        lam = moebius_conformal_factor(m, hopf(p))
        np.testing.assert_allclose(d.sigma, [0.0, lam, lam], rtol=1e-10, atol=1e-12)
        assert forms.normH < 1e-10


def test_closed_norm_formula_for_compositions(rng):
    check = composed_invariant_check(MoebiusMap.from_string("1+1i,0.5,-0.3i,2"), 20, rng)
    assert check.max_residual < 1e-6


def test_unitary_moebius_leaves_invariants_unchanged(rng):
    G = HopfComposedMoebius(MoebiusMap.from_string("0,1,-1,0"))
    stats = invariant_scan(G, 10, 1.0, rng)
    assert stats.max_deviation < 1e-10
