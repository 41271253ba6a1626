"""Equivariant maps S^3 -> S^2 and the minimality equation for their profiles.

In the chart p = (sin s e^{i xi}, cos s e^{i eta}) the map is

    f_kl(xi, eta, s) = (sin a(s) e^{i(k xi + l eta)}, cos a(s))

for a generating function ``a`` with a(0) = 0 and a(pi/2) = pi.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly
from scipy.optimize import brentq

from . import jets
from .charts import GUARD, _check_guard, ambient_to_chart, s3_frame
from .errors import BlowUp, DenominatorUnderflow, NoBracket, Stiffness
from .graphcore import SphereMap

HALF_PI = 0.5 * np.pi


# ---------------------------------------------------------------------------
# profiles


class Profile:
    """A generating function; ``derivatives(s, n)`` returns [a, a', ..., a^(n)]."""

    def derivatives(self, s, order: int = 2):  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, s):
        return self.derivatives(s, 0)[0]


class ClosedFormProfile(Profile):
    """Profile given by a jet-aware function of s; derivatives are exact."""

    def __init__(self, func: Callable, label: str = "closed-form"):
        self.func = func
        self.label = label

    def derivatives(self, s, order: int = 2):
        s = np.asarray(s, dtype=float)
        y = self.func(jets.Jet.variable(s, np.ones_like(s), max(order, 1)))
        return [y.derivative(n) for n in range(order + 1)]


def hopf_profile() -> ClosedFormProfile:
    return ClosedFormProfile(lambda s: 2.0 * s, "a = 2s")


def perturbed_profile(eps: float = 0.3) -> ClosedFormProfile:
    """a = 2s + eps sin 2s: satisfies the boundary conditions but is not minimal."""
    return ClosedFormProfile(lambda s: 2.0 * s + eps * jets.sin(2.0 * s), f"a = 2s + {eps:g} sin 2s")


@dataclass(frozen=True)
class GeneratingProfile(Profile):
    """Sampled profile with quintic Hermite interpolation through (a, a_s, a_ss)."""

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    second: np.ndarray
    leftCoeff: float
    rightCoeff: float
    _poly: BPoly = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        data = np.stack([self.values, self.derivs, self.second], axis=1)
        object.__setattr__(self, "_poly", BPoly.from_derivatives(self.grid, data[:, :, None].tolist()))

    def derivatives(self, s, order: int = 2):
        s = np.asarray(s, dtype=float)
        out = [np.asarray(self._poly(s)).reshape(s.shape)]
        for n in range(1, order + 1):
            out.append(np.asarray(self._poly.derivative(n)(s)).reshape(s.shape))
        return out

    def satisfies_boundary(self, tol: float = 1e-10) -> bool:
        return abs(self.values[0]) <= tol and abs(self.values[-1] - np.pi) <= tol

    def to_csv_rows(self, residual: np.ndarray | None = None):
        res = np.zeros_like(self.grid) if residual is None else residual
        return [(s, a, da, r) for s, a, da, r in zip(self.grid, self.values, self.derivs, res)]


# ---------------------------------------------------------------------------
# the map


class EquivariantMap(SphereMap):
    source_dim, target_dim = 3, 2

    def __init__(self, k: int, l: int, profile: Profile, target_radius: float = 1.0):
        if k * l == 0:
            raise ValueError("equivariant maps need k*l != 0 to be submersions away from the endpoints")
        self.k, self.l = int(k), int(l)
        self.profile = profile
        self.target_radius = float(target_radius)
        self.name = f"equivariant(k={k}, l={l})"

    def __call__(self, x):
        x0, x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
        r1 = jets.sqrt(x0 * x0 + x1 * x1)
        r2 = jets.sqrt(x2 * x2 + x3 * x3)
        s = jets.arctan2(r1, r2)
        phase = ((x0 + 1j * x1) / r1) ** self.k * ((x2 + 1j * x3) / r2) ** self.l
        if isinstance(s, jets.Jet):
            a = jets.compose(s, self.profile.derivatives(s.value, s.order))
        else:
            a = self.profile(s)
        sa, ca = jets.sincos(a)
        r = self.target_radius
        return jets.stack([sa * jets.real(phase) * r, sa * jets.imag(phase) * r, ca * r])


# ---------------------------------------------------------------------------
# closed forms


def _q2(k, l, s):
    return l**2 * np.sin(s) ** 2 + k**2 * np.cos(s) ** 2


@dataclass(frozen=True)
class EquivariantSingular:
    lam2: float
    lam3: float
    alpha: np.ndarray  # rows alpha_1, alpha_2, alpha_3 in (v1, v2, v3) components


def equivariant_singular_values(k, l, a, a_s, s, delta: float = GUARD) -> EquivariantSingular:
    """Singular values (0, lam2, lam3) and eigen-directions in the (v1, v2, v3) frame."""
    _check_guard(s, delta)
    ss, cs = np.sin(s), np.cos(s)
    lam2 = np.sqrt(k**2 * np.sin(a) ** 2 / ss**2 + l**2 * np.sin(a) ** 2 / cs**2)
    n = np.sqrt(_q2(k, l, s))
    alpha = np.array([[l * ss / n, -k * cs / n, 0.0], [k * cs / n, l * ss / n, 0.0], [0.0, 0.0, 1.0]])
    return EquivariantSingular(float(lam2), float(abs(a_s)), alpha)


def equivariant_frames(k, l, profile: Profile, p):
    """The adapted frames in ambient coordinates, oriented as in the closed formulas.

    Returns ``(alpha, beta, (lam2, lam3))`` with alpha_3 = d_s, beta_2 the unit
    azimuthal direction and beta_3 = d_a on the target.
    """
    c = ambient_to_chart(p)
    a, a_s = profile.derivatives(c.s, 1)
    sv = equivariant_singular_values(k, l, float(a), float(a_s), c.s)
    v = s3_frame(c)
    alpha = sv.alpha @ v
    sigma = k * c.xi + l * c.eta
    a = float(a)
    beta = np.array(
        [
            [-np.sin(sigma), np.cos(sigma), 0.0],
            [np.cos(a) * np.cos(sigma), np.cos(a) * np.sin(sigma), -np.sin(a)],
        ]
    )
    return alpha, beta, (sv.lam2, sv.lam3)


def equivariant_h_components(k, l, profile: Profile, s) -> np.ndarray:
    """h[a, i, j] (a = 0 for xi_4, 1 for xi_5) from the closed formulas.

    Valid where a_s > 0, in the frame of :func:`equivariant_frames`.
    """
    _check_guard(s)
    a, a_s, a_ss = (float(x) for x in profile.derivatives(s, 2))
    ss, cs = np.sin(s), np.cos(s)
    sa, ca = np.sin(a), np.cos(a)
    q2 = _q2(k, l, s)  # l^2 sin^2 s + k^2 cos^2 s
    lam2 = np.sqrt(k**2 * sa**2 / ss**2 + l**2 * sa**2 / cs**2)
    r2, r3 = np.sqrt(1 + lam2**2), np.sqrt(1 + a_s**2)
    den = ss**2 * cs**2 + sa**2 * q2
    h = np.zeros((2, 3, 3))
    h[0, 0, 2] = h[0, 2, 0] = -k * l * lam2 / (q2 * r2 * r3)
    h[0, 1, 2] = h[0, 2, 1] = (a_s * ca * ss * cs * q2 + sa * (l**2 * ss**4 - k**2 * cs**4)) / (np.sqrt(q2) * den * r3)
    h[1, 0, 0] = a_s * (l**2 - k**2) * cs * ss / (r3 * q2)
    h[1, 0, 1] = h[1, 1, 0] = k * l * a_s / (r2 * r3 * q2)
    h[1, 2, 2] = a_ss / ((1 + a_s**2) * r3)
    h[1, 1, 1] = (a_s * ss * cs * (k**2 * cs**4 - l**2 * ss**4) - sa * ca * q2**2) / (r3 * q2 * den)
    return h


def minimality_residual(k, l, a, a_s, a_ss, s) -> float:
    """Signed left side of the minimality equation for the generating function."""
    ss, cs = np.sin(s), np.cos(s)
    sa, ca = np.sin(a), np.cos(a)
    den = ss**2 * cs**2 + sa**2 * (l**2 * ss**2 + k**2 * cs**2)
    if np.any(den < 1e-14):
        raise DenominatorUnderflow(f"denominator {den!r} at s={s!r}")
    num = cs * ss * (np.cos(2 * s) + (l**2 - k**2) * sa**2) * a_s - sa * ca * (k**2 * cs**2 + l**2 * ss**2)
    return a_ss / (1 + a_s**2) + num / den


def _acceleration(k, l, s, a, a_s):
    ss, cs = np.sin(s), np.cos(s)
    sa, ca = np.sin(a), np.cos(a)
    den = ss**2 * cs**2 + sa**2 * (l**2 * ss**2 + k**2 * cs**2)
    num = cs * ss * (np.cos(2 * s) + (l**2 - k**2) * sa**2) * a_s - sa * ca * (k**2 * cs**2 + l**2 * ss**2)
    return -(1 + a_s**2) * num / den


def conformal_profile(k, l, c, s):
    """Weakly conformal generating function with a(0) = 0, a(pi/2) = pi.

    Solves a_s = sin a * sqrt(k^2/sin^2 s + l^2/cos^2 s) via
    tan(a/2) = c ((l + Q)/cos s)^l / ((k + Q)/sin s)^k,  Q = sqrt(k^2 cos^2 s + l^2 sin^2 s),
    which reduces to c tan^k s when k = l.  Accepts jets.
    """
    ss, cs = jets.sincos(s)
    if k == l:
        return 2.0 * jets.arctan(c * (ss / cs) ** k)
    q = jets.sqrt(k**2 * cs * cs + l**2 * ss * ss)
    return 2.0 * jets.arctan(c * ((l + q) / cs) ** l / ((k + q) / ss) ** k)


def conformal_profile_literal(k, l, c, s):
    """The l > k closed form exactly as commonly printed.

    It solves the conformality equation with k and l interchanged, i.e.
    a_s = sin a * sqrt(l^2/sin^2 s + k^2/cos^2 s); kept to document that.
    """
    ss, cs = jets.sincos(s)
    num = (l / ss - jets.sqrt(l**2 * (cs / ss) ** 2 + k**2)) ** l
    den = (jets.sqrt(k**2 * (ss / cs) ** 2 + l**2) - k / cs) ** k
    return 2.0 * jets.arctan(c * num / den)


def conformality_residual(k, l, profile_fn: Callable, s) -> np.ndarray:
    """a_s - sin a sqrt(k^2/sin^2 s + l^2/cos^2 s) with a_s from exact jets."""
    s = np.asarray(s, dtype=float)
    y = profile_fn(jets.Jet.variable(s, np.ones_like(s), 1))
    a, a_s = y.value, y.derivative(1)
    return a_s - np.sin(a) * np.sqrt(k**2 / np.sin(s) ** 2 + l**2 / np.cos(s) ** 2)


# ---------------------------------------------------------------------------
# endpoint analysis and shooting


@dataclass(frozen=True)
class EndpointReport:
    left: float  # aS0 (1 - k^2): coefficient forcing a_ss to blow up at s = 0
    right: float  # aS0 (1 - l^2): the mirrored coefficient at s = pi/2

    @property
    def regular(self) -> bool:
        return self.left == 0.0 and self.right == 0.0


def endpoint_analysis(k, l, aS0: float) -> EndpointReport:
    """Leading coefficient of the numerator of the equation near each endpoint.

    With a = aS0 s + O(s^3) the numerator behaves like aS0 (1 - k^2) s while
    the denominator is O(s^2), so a C^2 solution needs k^2 = 1 (and l^2 = 1 at
    the other end).
    """
    return EndpointReport(float(aS0 * (1 - k * k)), float(aS0 * (1 - l * l)))


@dataclass(frozen=True)
class Nonexistence:
    k: int
    l: int
    endpoint: str
    coefficient: float
    reason: str


def frobenius_cubic(A: float, l: int) -> float:
    """a_3 in a = A s + a_3 s^3 + O(s^5) at an endpoint where the near index is +-1.

    ``l`` is the index attached to the far factor (cos s at s = 0).  Obtained
    by matching the s^3 coefficient of the cleared equation.
    """
    return A * (-3 * A * A * l * l + A * A + 3 * l * l + 5) / 24.0


@dataclass(frozen=True)
class ShootingConfig:
    startOffset: float = 1e-6
    rtol: float = 1e-10
    atol: float = 1e-12
    matchPoint: float = np.pi / 4
    tolerance: float = 1e-10
    scan: tuple = (0.1, 20.0)
    scanPoints: int = 12
    flatTolerance: float = 1e-6
    mismatchOffset: float = 1e-3
    gridPoints: int = 2001


DEFAULT_SHOOTING = ShootingConfig()


def _branch(k, l, A, t_end, cfg: ShootingConfig):
    """Integrate from t = eps with the regular series seed of slope A."""
    eps = cfg.startOffset
    a3 = frobenius_cubic(A, l)
    y0 = [A * eps + a3 * eps**3, A + 3 * a3 * eps**2]

    def rhs(t, y):
        return [y[1], _acceleration(k, l, t, y[0], y[1])]

    def leave_band(t, y):
        return min(y[0] + 0.1, np.pi + 0.1 - y[0], 1e6 - abs(y[1]))

    leave_band.terminal = True
    sol = solve_ivp(rhs, (eps, t_end), y0, method="DOP853", rtol=cfg.rtol, atol=cfg.atol, dense_output=True, events=leave_band)
    if sol.status == 1:
        a_end = sol.y[0, -1]
        exc = BlowUp(f"profile left the admissible band at s={sol.t[-1]:.6g} (slope {A:.6g})")
        # overshooting pi (or a runaway slope) counts as a negative mismatch
        exc.direction = 1.0 if a_end < 0 else -1.0
        raise exc
    if sol.status != 0:
        raise Stiffness(sol.message)
    return sol


@dataclass(frozen=True)
class ShotResult:
    aS0: float
    mismatch: float
    solution: object = field(repr=False)


def shoot(k, l, aS0: float, cfg: ShootingConfig = DEFAULT_SHOOTING):
    """Integrate from s = eps towards pi/2 and return the regularity mismatch.

    With t = pi/2 - s the regular branch at the far end reads
    pi - a = B t + b_3 t^3 + O(t^5) with B = a_s there, so
    pi - a - t a_s - 2 b_3(B) t^3 = O(t^5) exactly when the trajectory joins
    it.  The mismatch is taken at t = ``cfg.mismatchOffset``: closer in, the
    1/t mode of the linearisation amplifies integration error.
    Returns a :class:`Nonexistence` record when the endpoint analysis fails.
    """
    k, l = abs(int(k)), abs(int(l))
    ends = endpoint_analysis(k, l, aS0)
    if ends.left != 0.0:
        return Nonexistence(k, l, "s=0", ends.left, "k^2 != 1 forces unbounded a_ss at s=0")
    t = max(cfg.mismatchOffset, cfg.startOffset)
    sol = _branch(k, l, aS0, HALF_PI - t, cfg)
    a, a_s = sol.y[:, -1]
    b3 = frobenius_cubic(a_s, k)
    return ShotResult(float(aS0), float(np.pi - a - t * a_s + 2 * b3 * t**3), sol)


@dataclass(frozen=True)
class BVPSolution:
    profile: GeneratingProfile
    aS0: float
    bS0: float
    selection: str
    scan: tuple
    max_residual: float


def _match_gap(k, l, A, B, cfg):
    s_star = cfg.matchPoint
    left = _branch(k, l, A, s_star, cfg)
    right = _branch(l, k, B, HALF_PI - s_star, cfg)
    return float(left.y[0, -1] - (np.pi - right.y[0, -1])), left, right


def _root(fn, lo, hi, tol):
    return brentq(fn, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)


def solve_bvp(k, l, cfg: ShootingConfig = DEFAULT_SHOOTING):
    """Find a regular solution of the minimality equation with a(0) = 0, a(pi/2) = pi.

    The one-sided mismatch is scanned over ``cfg.scan``.  A sign change is
    refined by bracketing; the profile is then re-assembled from a left and
    a right branch joined at ``cfg.matchPoint``.  When the mismatch vanishes
    across the whole scan the regular solutions form a family (this happens
    for k = l = 1, where every 2 arctan(c tan s) is a solution); the solver
    then selects the member invariant under (s, a) -> (pi/2 - s, pi - a).
    """
    k, l = abs(int(k)), abs(int(l))
    ends = endpoint_analysis(k, l, 1.0)
    if ends.left != 0.0:
        return Nonexistence(k, l, "s=0", ends.left, "k^2 != 1 forces unbounded a_ss at s=0")
    if ends.right != 0.0:
        return Nonexistence(k, l, "s=pi/2", ends.right, "l^2 != 1 forces unbounded a_ss at s=pi/2")

    lo, hi = cfg.scan
    grid = np.geomspace(lo, hi, cfg.scanPoints)
    values = []
    for A in grid:
        try:
            values.append(shoot(k, l, A, cfg).mismatch)
        except BlowUp as exc:
            values.append(np.inf * exc.direction)
        except Stiffness:
            values.append(np.nan)
    values = np.array(values)
    scan = tuple(zip(grid.tolist(), values.tolist()))

    finite = np.isfinite(values)
    if finite.all() and np.max(np.abs(values)) <= cfg.flatTolerance:
        if k != l:
            raise NoBracket("mismatch vanishes identically but no symmetric selection applies")
        selection = "reflection-symmetric member of a one-parameter family"

        def gap(A):
            return _match_gap(k, l, A, A, cfg)[0]

        A = _root(gap, lo, hi, cfg.tolerance)
        B = A
    else:
        signs = np.sign(np.where(np.isnan(values), 0.0, values))
        idx = [i for i in range(len(grid) - 1) if signs[i] * signs[i + 1] < 0]
        if not idx:
            raise NoBracket(f"mismatch keeps one sign on [{lo}, {hi}]")
        i = idx[0]

        def safe(A):
            try:
                return shoot(k, l, A, cfg).mismatch
            except BlowUp as exc:
                return exc.direction

        A = _root(safe, grid[i], grid[i + 1], cfg.tolerance)
        selection = "one-sided shooting"
        # polish: find the right slope joining the left branch at the match point
        B = _root(lambda b: _match_gap(k, l, A, b, cfg)[0], lo, hi, cfg.tolerance)

    _, left, right = _match_gap(k, l, A, B, cfg)
    profile = _stitch(k, l, A, B, left, right, cfg)
    res = profile_residual(k, l, profile)
    return BVPSolution(profile, float(A), float(B), selection, scan, float(np.max(np.abs(res))))


def chebyshev_grid(n: int) -> np.ndarray:
    j = np.arange(n)
    return 0.25 * np.pi * (1 - np.cos(np.pi * j / (n - 1)))


def _stitch(k, l, A, B, left, right, cfg) -> GeneratingProfile:
    s = chebyshev_grid(cfg.gridPoints)
    eps = cfg.startOffset
    a = np.empty_like(s)
    da = np.empty_like(s)
    a3, b3 = frobenius_cubic(A, l), frobenius_cubic(B, k)
    for idx, sv in enumerate(s):
        t = HALF_PI - sv
        if sv < eps:
            a[idx], da[idx] = A * sv + a3 * sv**3, A + 3 * a3 * sv**2
        elif t < eps:
            a[idx], da[idx] = np.pi - (B * t + b3 * t**3), B + 3 * b3 * t**2
        elif sv <= cfg.matchPoint:
            a[idx], da[idx] = left.sol(sv)
        else:
            y = right.sol(t)
            a[idx], da[idx] = np.pi - y[0], y[1]
    s[0], s[-1] = 0.0, HALF_PI
    a[0], a[-1] = 0.0, np.pi
    dd = np.empty_like(s)
    inner = slice(1, -1)
    dd[inner] = _acceleration(k, l, s[inner], a[inner], da[inner])
    dd[0] = 0.0
    dd[-1] = 0.0
    return GeneratingProfile(s, a, da, dd, float(A), float(B))


def profile_residual(k, l, profile: Profile, s=None) -> np.ndarray:
    """Minimality residual at interval midpoints inside the chart guard band (or at the given s)."""
    if s is None:
        g = profile.grid
        s = 0.5 * (g[1:] + g[:-1])
        s = s[(s > GUARD) & (s < HALF_PI - GUARD)]
    a, a_s, a_ss = profile.derivatives(s, 2)
    return minimality_residual(k, l, a, a_s, a_ss, s)
