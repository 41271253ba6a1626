import numpy as np
import pytest
import sympy as sp

from hopfgraphs.charts import hopf_chart_coords
from hopfgraphs.equivariant import (
    ClosedFormProfile,
    EquivariantMap,
    GeneratingProfile,
    Nonexistence,
    conformal_profile,
    conformal_profile_literal,
    conformality_residual,
    endpoint_analysis,
    equivariant_frames,
    equivariant_h_components,
    frobenius_cubic,
    hopf_profile,
    minimality_residual,
    perturbed_profile,
    profile_residual,
    shoot,
    solve_bvp,
)
from hopfgraphs.graphcore import analyze, graph_frames, reexpress_h, singular_decompose
from hopfgraphs.hopfmodels import HopfComplex

S_INNER = np.linspace(0.1, np.pi / 2 - 0.1, 15)


def _minimality_expr(k, l, a, s):
    a_s, a_ss = sp.diff(a, s), sp.diff(a, s, 2)
    den = sp.sin(s) ** 2 * sp.cos(s) ** 2 + sp.sin(a) ** 2 * (l**2 * sp.sin(s) ** 2 + k**2 * sp.cos(s) ** 2)
    num = sp.cos(s) * sp.sin(s) * (sp.cos(2 * s) + (l**2 - k**2) * sp.sin(a) ** 2) * a_s - sp.sin(a) * sp.cos(a) * (
        k**2 * sp.cos(s) ** 2 + l**2 * sp.sin(s) ** 2
    )
    return a_ss * den + (1 + a_s**2) * num


def test_arctan_family_solves_the_minimality_equation_symbolically():
    s, c = sp.symbols("s c", positive=True)
    expr = _minimality_expr(1, 1, 2 * sp.atan(c * sp.tan(s)), s)
    for cv in (sp.Rational(1, 3), 1, 2):
        for sv in (sp.Rational(1, 5), sp.Rational(7, 10), sp.Rational(13, 10)):
            assert abs(float(expr.subs({c: cv, s: sv}).evalf(30))) < 1e-25


def test_numeric_minimality_residual_matches_the_symbolic_equation():
    s = sp.symbols("s")
    a = 2 * s + sp.Rational(3, 10) * sp.sin(2 * s)
    k, l = 2, 3
    expr = sp.lambdify(s, _minimality_expr(k, l, a, s))
    prof = perturbed_profile(0.3)
    for sv in S_INNER:
        av, a_s, a_ss = (float(x) for x in prof.derivatives(sv, 2))
        den = np.sin(sv) ** 2 * np.cos(sv) ** 2 + np.sin(av) ** 2 * (l**2 * np.sin(sv) ** 2 + k**2 * np.cos(sv) ** 2)
        expected = expr(sv) / ((1 + a_s**2) * den)
        assert minimality_residual(k, l, av, a_s, a_ss, sv) == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_hopf_profile_is_congruent_to_the_complex_hopf_map():
    # the two agree after xi -> -xi on the source and a half-turn of the target
    f = EquivariantMap(1, 1, hopf_profile())
    flip_source = np.array([1.0, -1.0, 1.0, 1.0])
    flip_target = np.array([1.0, -1.0, -1.0])
    for xi, eta, s in [(0.3, -1.1, 0.7), (2.0, 0.5, 1.3)]:
        p = np.asarray(hopf_chart_coords(xi, eta, s))
        np.testing.assert_allclose(f(p), flip_target * HopfComplex(1.0)(flip_source * p), atol=1e-15)


@pytest.mark.parametrize("k, l", [(1, 1), (2, 3), (1, 2), (-1, 2)])
def test_closed_form_second_fundamental_form_matches_the_general_routine(k, l):
    prof = perturbed_profile(0.3)
    f = EquivariantMap(k, l, prof)
    for s in (0.35, 0.6, 1.1):
        p = np.asarray(hopf_chart_coords(0.2, 0.4, s))
        d, _, forms = analyze(f, p)
        alpha, beta, (lam2, lam3) = equivariant_frames(k, l, prof, p)
        e, xi = graph_frames(d, alpha, beta, np.array([0.0, lam2, lam3]))
        np.testing.assert_allclose(reexpress_h(forms, d, e, xi), equivariant_h_components(k, l, prof, s), atol=1e-12)


def test_equivariant_singular_values_match_svd():
    prof = perturbed_profile(0.3)
    f = EquivariantMap(2, 3, prof)
    p = np.asarray(hopf_chart_coords(1.0, 2.0, 0.8))
    _, _, (lam2, lam3) = equivariant_frames(2, 3, prof, p)
    np.testing.assert_allclose(singular_decompose(f, p).sigma, sorted([0.0, lam2, lam3]), rtol=1e-12, atol=1e-12)


def test_equivariant_map_requires_both_indices():
    with pytest.raises(ValueError):
        EquivariantMap(0, 1, hopf_profile())


@pytest.mark.parametrize("k, l, c", [(1, 1, 1.0), (2, 2, 0.5), (1, 2, 1.0), (2, 3, 2.0), (3, 1, 0.7)])
def test_conformal_profiles_are_weakly_conformal(k, l, c):
    res = conformality_residual(k, l, lambda s: conformal_profile(k, l, c, s), S_INNER)
    assert np.max(np.abs(res)) < 1e-12
    prof = ClosedFormProfile(lambda s: conformal_profile(k, l, c, s))
    assert float(prof(1e-9)) == pytest.approx(0.0, abs=1e-6)
    assert float(prof(np.pi / 2 - 1e-9)) == pytest.approx(np.pi, abs=1e-6)


def test_literal_closed_form_solves_the_swapped_conformality_equation():
    k, l, c = 1, 2, 1.0
    literal = lambda s: conformal_profile_literal(k, l, c, s)
    assert np.max(np.abs(conformality_residual(k, l, literal, S_INNER))) > 1e-2
    assert np.max(np.abs(conformality_residual(l, k, literal, S_INNER))) < 1e-12


def test_endpoint_analysis():
    assert endpoint_analysis(1, 1, 2.0).regular
    rep = endpoint_analysis(2, 3, 1.5)
    assert (rep.left, rep.right) == (1.5 * (1 - 4), 1.5 * (1 - 9))
    assert not endpoint_analysis(1, 2, 1.0).regular


@pytest.mark.parametrize("l", [1, 2, 3])
def test_frobenius_cubic_matches_series_expansion(l):
    s, A, a3 = sp.symbols("s A a3")
    a = A * s + a3 * s**3
    expr = sp.series(_minimality_expr(1, l, a, s), s, 0, 4).removeO()
    # the s^1 coefficient vanishes identically; the s^3 one fixes a3
    assert sp.simplify(expr.coeff(s, 1)) == 0
    sol = sp.solve(sp.expand(expr.coeff(s, 3)), a3)
    assert len(sol) == 1
    for Av in (0.5, 2.0, 3.0):
        assert frobenius_cubic(Av, l) == pytest.approx(float(sol[0].subs(A, Av)), rel=1e-12)


def test_shooting_reports_nonexistence_for_higher_left_index():
    out = shoot(2, 2, 1.0)
    assert isinstance(out, Nonexistence) and out.endpoint == "s=0"


def test_solve_bvp_for_unit_indices_returns_the_hopf_profile():
    sol = solve_bvp(1, 1)
    assert sol.aS0 == pytest.approx(2.0, abs=1e-6)
    assert sol.profile.satisfies_boundary()
    s = sol.profile.grid
    assert np.max(np.abs(sol.profile.values - 2 * s)) < 1e-6
    assert sol.max_residual < 1e-8
    # reflection symmetry of the selected member
    np.testing.assert_allclose(sol.profile(np.pi / 2 - S_INNER), np.pi - sol.profile(S_INNER), atol=1e-6)


@pytest.mark.parametrize("k, l, endpoint", [(2, 2, "s=0"), (1, 2, "s=pi/2"), (3, 1, "s=0")])
def test_solve_bvp_reports_nonexistence(k, l, endpoint):
    out = solve_bvp(k, l)
    assert isinstance(out, Nonexistence)
    assert out.endpoint == endpoint and out.coefficient != 0.0


def test_generating_profile_interpolates_its_data():
    s = np.linspace(0.0, np.pi / 2, 50)
    prof = GeneratingProfile(s, 2 * s, 2 * np.ones_like(s), np.zeros_like(s), 2.0, 2.0)
    mid = 0.5 * (s[1:] + s[:-1])
    a, a_s, _ = prof.derivatives(mid, 2)
    np.testing.assert_allclose(a, 2 * mid, atol=1e-13)
    np.testing.assert_allclose(a_s, 2.0, atol=1e-11)
    assert np.max(np.abs(profile_residual(1, 1, prof))) < 1e-9
    with pytest.raises(ValueError):
        GeneratingProfile(s[::-1], s, s, s, 0.0, 0.0)
