"""Points, charts and frames on round spheres, and great-circle differentiation.

Geometry is done in ambient coordinates throughout: a point of S^m(r) is an
``(m+1)``-vector of norm ``r``.  Batched inputs carry extra leading axes.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import ChartDegenerate, NumericalBreakdown

GUARD = 1e-2  # distance kept from chart singularities when differentiating


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        object.__setattr__(self, "coords", c)
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if abs(np.linalg.norm(c) - self.radius) > 1e-12 * self.radius:
            raise ValueError(f"|coords| = {np.linalg.norm(c)!r} differs from radius {self.radius!r}")

    @property
    def dim(self) -> int:
        return self.coords.shape[0] - 1


@dataclass(frozen=True)
class TangentVector:
    base: SpherePoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=float)
        object.__setattr__(self, "vec", v)
        tol = 1e-10 * max(np.linalg.norm(v), 1.0) * self.base.radius
        if abs(v @ self.base.coords) > tol:
            raise ValueError("vector is not tangent at its base point")


def coords_of(p) -> np.ndarray:
    """Ambient coordinates of a SpherePoint, TangentVector or raw array."""
    if isinstance(p, SpherePoint):
        return p.coords
    if isinstance(p, TangentVector):
        return p.vec
    return np.asarray(p, dtype=float)


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class HopfChart3:
    """(xi, eta, s) with p = (sin s e^{i xi}, cos s e^{i eta})."""

    xi: float
    eta: float
    s: float


@dataclass(frozen=True)
class PolarChart2:
    """(sigma, a) with q = radius * (sin a e^{i sigma}, cos a)."""

    sigma: float
    a: float
    radius: float = 1.0


def chart_to_ambient(c):
    if isinstance(c, PolarChart2):
        sa = np.sin(c.a)
        return SpherePoint(c.radius * np.array([sa * np.cos(c.sigma), sa * np.sin(c.sigma), np.cos(c.a)]), c.radius)
    x = hopf_chart_coords(c.xi, c.eta, c.s)
    return SpherePoint(x / np.linalg.norm(x))


def hopf_chart_coords(xi, eta, s):
    """Vectorised (and jet-aware) S^3 parametrisation."""
    ss, cs = jets.sincos(s)
    sx, cx = jets.sincos(xi)
    se, ce = jets.sincos(eta)
    return jets.stack([ss * cx, ss * sx, cs * ce, cs * se])


def ambient_to_chart(p, polar: bool = False):
    x = coords_of(p)
    if polar:
        r = float(np.linalg.norm(x))
        a = float(np.arctan2(np.hypot(x[0], x[1]), x[2]))
        return PolarChart2(float(np.arctan2(x[1], x[0]) % (2 * np.pi)), a, r)
    s = float(np.arctan2(np.hypot(x[0], x[1]), np.hypot(x[2], x[3])))
    xi = float(np.arctan2(x[1], x[0]) % (2 * np.pi))
    eta = float(np.arctan2(x[3], x[2]) % (2 * np.pi))
    return HopfChart3(xi, eta, s)


def _check_guard(s, delta=GUARD):
    if np.any(np.sin(s) < delta) or np.any(np.cos(s) < delta):
        raise ChartDegenerate(f"s={s!r} is within {delta} of a chart singularity")


def s3_frame(c: HopfChart3, delta: float = GUARD) -> np.ndarray:
    """Rows v1 = d_xi/sin s, v2 = d_eta/cos s, v3 = d_s in ambient coordinates."""
    _check_guard(c.s, delta)
    sx, cx = np.sin(c.xi), np.cos(c.xi)
    se, ce = np.sin(c.eta), np.cos(c.eta)
    ss, cs = np.sin(c.s), np.cos(c.s)
    return np.array(
        [
            [-sx, cx, 0.0, 0.0],
            [0.0, 0.0, -se, ce],
            [cs * cx, cs * sx, -ss * ce, -ss * se],
        ]
    )


@dataclass(frozen=True)
class FrameConnectionTable:
    """coefficients[i, j, k] = <nabla_{v_i} v_j, v_k>."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (3, 3, 3):
            raise ValueError("connection table must be 3x3x3")
        object.__setattr__(self, "coefficients", c)

    def is_skew(self, tol: float = 0.0) -> bool:
        c = self.coefficients
        return bool(np.all(np.abs(c + c.transpose(0, 2, 1)) <= tol))


def s3_connection(c: HopfChart3, delta: float = GUARD) -> FrameConnectionTable:
    _check_guard(c.s, delta)
    cot, tan = 1.0 / np.tan(c.s), np.tan(c.s)
    t = np.zeros((3, 3, 3))
    t[0, 0, 2], t[0, 2, 0] = -cot, cot
    t[1, 1, 2], t[1, 2, 1] = tan, -tan
    return FrameConnectionTable(t)


def tangent_basis(p: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the tangent space at ``p`` (rows)."""
    p = coords_of(p)
    n = p.shape[-1]
    m = np.column_stack([p / np.linalg.norm(p), np.eye(n)])
    q, _ = np.linalg.qr(m)
    basis = q[:, 1:n].T
    # QR fixes signs only up to LAPACK conventions; make the leading entry of
    # each basis vector's largest component positive for reproducibility.
    idx = np.argmax(np.abs(basis), axis=1)
    signs = np.sign(basis[np.arange(n - 1), idx])
    return basis * signs[:, None]


# ---------------------------------------------------------------------------
# differentiation along great circles

FD_STEP = 1e-4
BREAKDOWN_TOL = 1e-4


def geodesic_jet(p, v, order: int = 2) -> jets.Jet:
    """Taylor jet of t -> cos t p + sin t v (|v| = |p| scaling not assumed)."""
    p, v = np.broadcast_arrays(coords_of(p), coords_of(v))
    c = np.zeros((order + 1,) + p.shape)
    for k in range(order + 1):
        # cos t = sum (-1)^j t^{2j}/(2j)!, sin t = sum (-1)^j t^{2j+1}/(2j+1)!
        sign = (-1) ** (k // 2)
        c[k] = sign * (p if k % 2 == 0 else v) / _fact(k)
    return jets.Jet(c)


def _fact(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def great_circle_jet(f: Callable, p, v, backend: str = "jet", step: float = FD_STEP):
    """First and second derivative of t -> f(cos t p + sin t v) at t = 0.

    ``backend="jet"`` propagates exact second-order jets through ``f``;
    ``backend="fd"`` uses central differences with one Richardson step and
    raises :class:`NumericalBreakdown` when the two step sizes disagree by more
    than ``BREAKDOWN_TOL`` relative to the derivatives.
    Leading axes of ``p`` and ``v`` are treated as a batch.
    """
    p, v = coords_of(p), coords_of(v)
    if backend == "jet":
        y = f(geodesic_jet(p, v, 2))
        return y.derivative(1), y.derivative(2)
    if backend != "fd":
        raise ValueError(f"unknown backend {backend!r}")

    def curve(t):
        return f(np.cos(t) * p + np.sin(t) * v)

    f0 = curve(0.0)
    d1, d2 = {}, {}
    for h in (step, step / 2):
        fp, fm = curve(h), curve(-h)
        d1[h] = (fp - fm) / (2 * h)
        d2[h] = (fp - 2 * f0 + fm) / (h * h)
    first = (4 * d1[step / 2] - d1[step]) / 3
    second = (4 * d2[step / 2] - d2[step]) / 3
    # the gap is the truncation error of the coarse estimate, so judge it
    # against the size of the derivatives rather than absolutely
    scale = max(1.0, float(np.max(np.abs(first))), float(np.max(np.abs(second))))
    gap = max(np.max(np.abs(d1[step] - d1[step / 2])), np.max(np.abs(d2[step] - d2[step / 2])))
    if gap > BREAKDOWN_TOL * scale:
        raise NumericalBreakdown(f"step halving changed derivatives by {gap:.3e}")
    return first, second


def tangential(x, q):
    """Component of ``x`` orthogonal to the radial direction ``q`` (batched)."""
    q = np.asarray(q)
    qq = np.sum(q * q, axis=-1, keepdims=True)
    return x - np.sum(x * q, axis=-1, keepdims=True) / qq * q


def directional_derivative(F: Callable, p, v, step: float = 1e-3):
    """Derivative of an arbitrary function F along the great circle through p with velocity v.

    F may return any array (or a tuple/list of arrays).  ``v`` need not be a
    unit vector; the geodesic is traversed at speed |v|.  Central differences
    with one Richardson step.
    """
    p, v = coords_of(p), coords_of(v)
    speed = np.linalg.norm(v)
    if speed == 0.0:
        return _scale(F(p), 0.0)
    u = v / speed

    def at(t):
        return F(np.cos(t) * p + np.sin(t) * u * np.linalg.norm(p))

    def cd(h):
        return _combine(at(h), at(-h), lambda a, b: (a - b) / (2 * h))

    d_h, d_h2 = cd(step), cd(step / 2)
    rich = _combine(d_h2, d_h, lambda a, b: (4 * a - b) / 3)
    return _scale(rich, speed / np.linalg.norm(p))


def _combine(a, b, op):
    if isinstance(a, (tuple, list)):
        return type(a)(_combine(x, y, op) for x, y in zip(a, b))
    if isinstance(a, dict):
        return {k: _combine(a[k], b[k], op) for k in a}
    return op(np.asarray(a), np.asarray(b))


def _scale(a, s):
    if isinstance(a, (tuple, list)):
        return type(a)(_scale(x, s) for x in a)
    if isinstance(a, dict):
        return {k: _scale(x, s) for k, x in a.items()}
    return np.asarray(a) * s


def sample_sphere(rng: np.random.Generator, dim: int, n: int) -> np.ndarray:
    """``n`` uniform points on S^dim by normalised Gaussians."""
    x = rng.standard_normal((n, dim + 1))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def sample_chart_points(rng: np.random.Generator, n: int, delta: float = GUARD) -> np.ndarray:
    """``n`` points of S^3 whose Hopf-chart s lies inside the guard band."""
    xi = rng.uniform(0, 2 * np.pi, n)
    eta = rng.uniform(0, 2 * np.pi, n)
    # uniform measure on S^3 in these coordinates is sin s cos s ds
    s = 0.5 * np.arccos(rng.uniform(np.cos(np.pi - 2 * delta), np.cos(2 * delta), n))
    return np.asarray(hopf_chart_coords(xi, eta, s))
