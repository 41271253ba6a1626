"""Verification suites: each returns a list of named checks with measured, expected and tolerance.

The suites are what the command line runs.  A check aggregates over its
sample points by keeping the worst value, so ``measured`` is the sample that
came closest to failing.
"""

from __future__ import annotations

import json
import math
import os
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .charts import GUARD, hopf_chart_coords, sample_sphere
from .curvature import connection_difference_residual, gauss_codazzi_residuals
from .equivariant import (
    HALF_PI,
    EquivariantMap,
    Nonexistence,
    conformal_profile,
    conformality_residual,
    minimality_residual,
    perturbed_profile,
    solve_bvp,
)
from .graphcore import analyze, singular_decompose
from .hopfmodels import (
    HopfComplex,
    HopfComposedMoebius,
    MoebiusMap,
    Octonion,
    composed_invariant_check,
    hopf_variant,
)
from .structure import (
    AngleFunctions,
    assemble_residuals,
    bochner_residuals,
    local_geometry,
    measure_feed,
    pinching_quantity,
)

DEFAULT_TOLERANCES = {
    "normA2_complex": 1e-6,
    "normA2_quaternionic": 1e-5,
    "normA2_octonionic": 1e-4,
    "singular_values": 1e-8,
    "minimal": 1e-6,
    "octonion_norm": 1e-12,
    "moebius_formula": 1e-4,
    "weakly_conformal": 1e-8,
    "dictionary": 1e-5,
    "connection": 1e-4,
    "gauss_tensor": 1e-5,
    "pinching": 1e-6,
    "pinching_sign": 1e-12,
    "orthonormal": 1e-12,
    "angle_bound": 1e-12,
    "gradient": 1e-5,
    "grad_w": 1e-6,
    "laplacian": 1e-3,
    "bvp_slope": 1e-6,
    "bvp_profile": 1e-6,
    "bvp_residual": 1e-8,
    "conformality": 1e-8,
    "gauss": 1e-4,
    "codazzi": 1e-4,
    "christoffel": 1e-4,
}

DEFAULT_MOEBIUS = (
    "2,0,0,1",
    "1,0.5,0,1",
    "1+1i,0.5,-0.3i,2",
    "0,1,-1,0",
    "1,-1i,0.7,1+0.5i",
)

STRUCTURE_GAP = 1e-3  # sampled points need mu - lam at least this large


class ConfigError(ValueError):
    """Bad command-line configuration; maps to exit status 2."""


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    measured: float
    expected: object
    tol: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "measured": _clean(self.measured),
            "expected": _clean(self.expected),
            "tol": _clean(self.tol),
            "pass": bool(self.passed),
        }


def _clean(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


@dataclass
class Report:
    suite: str
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "checks": [c.as_dict() for c in self.checks],
            "summary": {"passed": self.passed, "failed": self.failed},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        lines = ["name,anchor,measured,expected,tol,pass"]
        for c in self.checks:
            d = c.as_dict()
            cells = [d["name"], d["anchor"], _fmt(d["measured"]), _fmt(d["expected"]), _fmt(d["tol"]), str(d["pass"]).lower()]
            lines.append(",".join(_csv_cell(x) for x in cells))
        return "\n".join(lines) + "\n"


def _fmt(x):
    return format(x, ".17g") if isinstance(x, float) else str(x)


def _csv_cell(text: str) -> str:
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


# ---------------------------------------------------------------------------
# tolerances


def resolve_tolerances(overrides: dict | None = None, env: dict | None = None) -> dict:
    """Defaults, then explicit overrides, all multiplied by MMK_TOL_SCALE."""
    env = os.environ if env is None else env
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in tol:
            raise ConfigError(f"unknown tolerance {key!r}; known: {', '.join(sorted(tol))}")
        tol[key] = _positive(value, key)
    scale = env.get("MMK_TOL_SCALE")
    if scale is not None:
        factor = _positive(scale, "MMK_TOL_SCALE")
        tol = {k: v * factor for k, v in tol.items()}
    return tol


def _positive(value, what) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number, got {value!r}") from None
    if not (x > 0 and math.isfinite(x)):
        raise ConfigError(f"{what} must be positive and finite, got {value!r}")
    return x


# ---------------------------------------------------------------------------
# check builders


def target_check(name, anchor, values, expected, tol) -> Check:
    """Worst |value - expected| over samples must not exceed tol."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    dev = np.abs(values - expected)
    i = int(np.nanargmax(dev)) if np.any(np.isfinite(dev)) else 0
    ok = bool(np.all(np.isfinite(dev)) and dev[i] <= tol)
    return Check(name, anchor, float(values[i]), float(expected), float(tol), ok)


def bound_check(name, anchor, values, tol) -> Check:
    """Worst value must not exceed tol (values are nonnegative residuals)."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    worst = float(np.max(values)) if np.all(np.isfinite(values)) else float("nan")
    return Check(name, anchor, worst, 0.0, float(tol), bool(math.isfinite(worst) and worst <= tol))


def lower_check(name, anchor, values, tol) -> Check:
    """Smallest value must be at least -tol."""
    worst = float(np.min(np.asarray(values, dtype=float)))
    return Check(name, anchor, worst, 0.0, float(tol), bool(worst >= -tol))


# ---------------------------------------------------------------------------
# suites


def hopf_invariants_suite(samples: int, rng: np.random.Generator, tol: dict, target_radius: float | None = None) -> list[Check]:
    checks = []
    cases = [
        ("complex S3->S2(1)", HopfComplex(1.0), 16 / 25, "normA2_complex", "|A|^2 = 16/25 for the complex Hopf map onto the unit sphere"),
        ("complex S3->S2(1/2)", hopf_variant("complex"), 1.0, "normA2_complex", "|A|^2 = n for complex Hopf fibrations, n = 1"),
        ("quaternionic S7->S4(1/2)", hopf_variant("quaternionic"), 6.0, "normA2_quaternionic", "|A|^2 = 6n for quaternionic Hopf fibrations, n = 1"),
        ("octonionic S15->S8(1/2)", hopf_variant("octonionic"), 28.0, "normA2_octonionic", "|A|^2 = 28 for the octonionic Hopf fibration"),
    ]
    if target_radius is not None and target_radius not in (0.5, 1.0):
        r = target_radius
        cases.append(
            (f"complex S3->S2({r:g})", HopfComplex(r), 16 * r * r / (1 + 4 * r * r) ** 2, "normA2_complex", "|A|^2 = 16 r^2/(1 + 4 r^2)^2 for complex Hopf onto S^2(r)")
        )
    for label, f, expected, key, anchor in cases:
        pts = sample_sphere(rng, f.source_dim, samples)
        normA2, normH, sv = [], [], []
        for p in pts:
            data, _, forms = analyze(f, p)
            normA2.append(forms.normA2)
            normH.append(forms.normH)
            sv.append(data.sigma)
        checks.append(target_check(f"{label}: |A|^2", anchor, normA2, expected, tol[key]))
        checks.append(bound_check(f"{label}: |H|", "Hopf fibrations have minimal graphs", normH, tol["minimal"]))
        if label.startswith("complex S3->S2(1)"):
            sv = np.array(sv)
            dev = np.max(np.abs(sv - np.array([0.0, 2.0, 2.0])), axis=1)
            checks.append(bound_check(f"{label}: singular values (0,2,2)", "complex Hopf onto the unit sphere has singular values 0, 2, 2", dev, tol["singular_values"]))
    x = rng.standard_normal((samples, 8))
    y = rng.standard_normal((samples, 8))
    rel = [abs((Octonion(a) * Octonion(b)).norm() - Octonion(a).norm() * Octonion(b).norm()) / (Octonion(a).norm() * Octonion(b).norm()) for a, b in zip(x, y)]
    checks.append(bound_check("octonion norm multiplicativity", "octonions form a normed division algebra", rel, tol["octonion_norm"]))
    return checks


def _moebius_list(moebius: list[str] | None) -> list[tuple[str, MoebiusMap]]:
    texts = list(moebius) if moebius else list(DEFAULT_MOEBIUS)
    out = []
    for t in texts:
        try:
            out.append((t, MoebiusMap.from_string(t)))
        except ValueError as exc:
            raise ConfigError(f"bad --moebius {t!r}: {exc}") from None
    return out


def scan_conformal_suite(samples: int, rng: np.random.Generator, tol: dict, k: int = 1, l: int = 2, c: float = 1.0, moebius=None) -> list[Check]:
    """Hopf o Moebius minimality and the |A|^2 formula, plus the conformal a-Hopf profiles."""
    checks = []
    for text, m in _moebius_list(moebius):
        G = HopfComposedMoebius(m)
        pts = sample_sphere(rng, 3, samples)
        normH, gaps = [], []
        for p in pts:
            data, _, forms = analyze(G, p)
            normH.append(forms.normH)
            gaps.append(data.mu - data.lam)
        checks.append(bound_check(f"Hopf o Moebius[{text}]: |H|", "Hopf composed with a Moebius map is again a minimal map", normH, tol["minimal"]))
        checks.append(bound_check(f"Hopf o Moebius[{text}]: mu - lam", "Hopf composed with a Moebius map is weakly conformal", gaps, tol["weakly_conformal"]))
        if not m.is_unitary():
            res = composed_invariant_check(m, samples, points=pts)
            dev = np.abs(res.measured - res.predicted)
            checks.append(bound_check(f"Hopf o Moebius[{text}]: |A|^2 formula", "|A_G|^2 = 4(lam^2(1+lam^2) + |grad lam|^2)/(1+lam^2)^3", dev, tol["moebius_formula"]))
    if c <= 0:
        raise ConfigError("--c must be positive")
    for kk, ll in sorted({(k, k), (min(k, l), max(k, l))}):
        s = rng.uniform(GUARD, HALF_PI - GUARD, samples)
        branch = "k = l" if kk == ll else "l > k"
        res = np.abs(conformality_residual(kk, ll, lambda x, kk=kk, ll=ll: conformal_profile(kk, ll, c, x), s))
        checks.append(bound_check(f"conformal profile ({branch}, k={kk}, l={ll}, c={c:g})", "closed-form weakly conformal a-Hopf profiles", res, tol["conformality"]))
    return checks


def sample_structure_points(f, rng: np.random.Generator, samples: int, gap: float = STRUCTURE_GAP, delta: float = 0.05):
    """Seeded points in the chart guard band where the two nonzero singular values differ by at least ``gap``."""
    pts = []
    rejected = 0
    while len(pts) < samples:
        xi, eta = rng.uniform(0, 2 * np.pi, 2)
        s = 0.5 * np.arccos(rng.uniform(np.cos(np.pi - 2 * delta), np.cos(2 * delta)))
        p = np.asarray(hopf_chart_coords(xi, eta, s))
        d = singular_decompose(f, p)
        if d.mu - d.lam < gap:
            rejected += 1
            if rejected > 100 * samples:
                raise ConfigError("could not find points with separated singular values")
            continue
        pts.append(p)
    return np.array(pts), rejected


def structure_suite(samples: int, rng: np.random.Generator, tol: dict, k: int = 1, l: int = 1, eps: float = 0.3) -> list[Check]:
    f = EquivariantMap(k, l, perturbed_profile(eps))
    pts, _ = sample_structure_points(f, rng, samples)
    groups: dict[str, list[float]] = {}
    pinch, pinch_pred, ortho, angle = [], [], [], []
    for p in pts:
        geo = local_geometry(f, p)
        for r in assemble_residuals(measure_feed(geo)):
            groups.setdefault(r.group, []).append(r.value)
        d = geo.data
        lam, mu = d.lam, d.mu
        pinch.append(pinching_quantity(f, p))
        pinch_pred.append((mu - lam) ** 2 / ((1 + lam**2) * (1 + mu**2)))
        gram_e = np.array([[d.e[i] @ d.e[j] for j in range(3)] for i in range(3)])
        gram_x = d.xi @ d.xi.T
        ortho.append(max(np.max(np.abs(gram_e - np.eye(3))), np.max(np.abs(gram_x - np.eye(2))), np.max(np.abs(d.e @ d.xi.T))))
        angle.append(AngleFunctions.from_singular(lam, mu).w)
    label = f"perturbed equivariant (k={k}, l={l})"
    anchors = {
        "dictionary": ("dictionary", "Hessian / second fundamental form dictionary and e_i(arctan lam) relations"),
        "alpha_connection": ("connection", "Levi-Civita connection of S^3 in the singular frame alpha"),
        "normal_connection": ("connection", "normal connection <nabla^perp xi_4, xi_5>"),
        "graph_connection": ("connection", "graph-metric connection table in the frame e"),
        "bracket": ("connection", "Lie brackets [e1, e2] and [e1, e3]"),
        "gauss_tensor": ("gauss_tensor", "phi_i2 = h4_1i / lam and phi_i3 = h5_1i / mu for phi = -nabla e1"),
    }
    checks = []
    for group, values in groups.items():
        key, anchor = anchors[group]
        checks.append(bound_check(f"{label}: {group}", anchor, values, tol[key]))
    dev = np.abs(np.array(pinch) - np.array(pinch_pred))
    checks.append(bound_check(f"{label}: pinching C value", "C = (lam3 - lam2)^2/((1 + lam2^2)(1 + lam3^2)) for equivariant maps", dev, tol["pinching"]))
    checks.append(lower_check(f"{label}: pinching C sign", "C >= 0 for equivariant maps", pinch, tol["pinching_sign"]))
    checks.append(bound_check(f"{label}: frame orthonormality", "adapted frames e, xi are orthonormal", ortho, tol["orthonormal"]))
    w_max = float(np.max(angle))
    checks.append(Check(f"{label}: w <= 1", "w = u1 + u2 <= 1", w_max, 1.0, tol["angle_bound"], w_max <= 1.0 + tol["angle_bound"]))
    return checks


def bochner_suite(samples: int, rng: np.random.Generator, tol: dict, moebius=None) -> list[Check]:
    checks = []
    for text, m in _moebius_list(moebius or ["2,0,0,1", "1+1i,0.5,-0.3i,2"]):
        G = HopfComposedMoebius(m, target_radius=1.0)
        pts = sample_sphere(rng, 3, samples)
        rows = [bochner_residuals(G, p) for p in pts]
        label = f"Hopf o Moebius[{text}] onto S^2(1)"
        col = {k: [getattr(r, k) for r in rows] for k in ("gradU1", "lapU1", "gradU2", "lapU2", "gradW", "lapW", "laplacian_paths")}
        grad_w = [r.measured["gradW"] for r in rows]
        checks += [
            bound_check(f"{label}: grad u1", "grad u1 = -u1 sum_k (lam h4_k2 + mu h5_k3) e_k", col["gradU1"], tol["gradient"]),
            bound_check(f"{label}: Laplacian u1", "Bochner formula for u1 on minimal graphs", col["lapU1"], tol["laplacian"]),
            bound_check(f"{label}: grad u2", "grad u2 = u1 sum_k (mu h4_k2 + lam h5_k3) e_k", col["gradU2"], tol["gradient"]),
            bound_check(f"{label}: Laplacian u2", "Bochner formula for u2 on minimal submersions", col["lapU2"], tol["laplacian"]),
            bound_check(f"{label}: |grad w|", "w = 1 on weakly conformal maps, so grad w = 0", grad_w, tol["grad_w"]),
            bound_check(f"{label}: |grad w| formula", "|grad w|^2 formula for minimal submersions", col["gradW"], tol["grad_w"]),
            bound_check(f"{label}: Laplacian w", "Bochner formula for w = u1 + u2", col["lapW"], tol["laplacian"]),
            bound_check(f"{label}: frame vs chart Laplacian", "two independent Laplacian discretisations agree", col["laplacian_paths"], tol["laplacian"]),
        ]
    return checks


@dataclass
class OdeOutcome:
    checks: list[Check]
    rows: list[tuple] | None


def solve_ode_suite(tol: dict, k: int = 1, l: int = 1) -> OdeOutcome:
    sol = solve_bvp(k, l)
    expects_solution = k * k == 1 and l * l == 1
    if isinstance(sol, Nonexistence):
        anchor = "k^2 = 1 and l^2 = 1 are necessary for a regular minimal a-Hopf profile"
        check = Check(f"nonexistence at {sol.endpoint} (k={k}, l={l})", anchor, sol.coefficient, "nonzero", 0.0, (sol.coefficient != 0.0) == (not expects_solution))
        return OdeOutcome([check], None)
    prof = sol.profile
    s = prof.grid
    checks = [Check(f"solver converged (k={k}, l={l})", "regular solutions exist only for k^2 = l^2 = 1", 1.0, 1.0, 0.0, expects_solution)]
    checks.append(target_check("a_s(0)", "the minimal profile for k = l = 1 is a = 2s", [sol.aS0], 2.0, tol["bvp_slope"]))
    checks.append(bound_check("sup |a - 2s|", "the minimal profile for k = l = 1 is a = 2s", np.abs(prof.values - 2 * s), tol["bvp_profile"]))
    checks.append(bound_check("minimality residual at interval midpoints", "generating function satisfies the minimality equation", [sol.max_residual], tol["bvp_residual"]))
    rows = []
    a_ss = np.gradient(prof.derivs, s)
    for si, a, da, dd in zip(s, prof.values, prof.derivs, a_ss):
        if GUARD < si < HALF_PI - GUARD:
            r = float(minimality_residual(k, l, a, da, dd, si))
        else:
            r = float("nan")
        rows.append((float(si), float(a), float(da), r))
    return OdeOutcome(checks, rows)


def codazzi_suite(samples: int, rng: np.random.Generator, tol: dict, k: int = 1, l: int = 1, eps: float = 0.3) -> list[Check]:
    checks = []
    for kk, ll in sorted({(k, l), (2, 3)}):
        f = EquivariantMap(kk, ll, perturbed_profile(eps))
        gauss, cod, chris = [], [], []
        for _ in range(samples):
            y = np.array([rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi), rng.uniform(0.1, HALF_PI - 0.1)])
            rep = gauss_codazzi_residuals(f, y, rng=rng)
            gauss.append(rep.gauss)
            cod.append(rep.codazzi)
            chris.append(connection_difference_residual(f, y))
        label = f"perturbed equivariant (k={kk}, l={ll})"
        checks += [
            bound_check(f"{label}: Gauss equation", "Gauss equation for the graph in S^3 x S^2", gauss, tol["gauss"]),
            bound_check(f"{label}: Codazzi equation", "Codazzi equation for the graph in S^3 x S^2", cod, tol["codazzi"]),
            bound_check(f"{label}: connection difference", "nabla^g - nabla^S3 = (I + df^t df)^(-1) df^t B", chris, tol["christoffel"]),
        ]
    return checks


SUITES: dict[str, Callable] = {
    "hopf-invariants": hopf_invariants_suite,
    "scan-conformal": scan_conformal_suite,
    "verify-structure": structure_suite,
    "verify-bochner": bochner_suite,
    "codazzi-check": codazzi_suite,
}

DEFAULT_SAMPLES = {
    "hopf-invariants": 100,
    "scan-conformal": 50,
    "verify-structure": 200,
    "verify-bochner": 20,
    "codazzi-check": 10,
    "solve-ode": 1,
}
