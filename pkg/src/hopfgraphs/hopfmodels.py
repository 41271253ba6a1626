"""Division algebras, the Hopf fibrations, and Hopf maps composed with Moebius maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .charts import coords_of, sample_sphere
from .errors import PoleSwapExhausted
from .graphcore import SphereMap, analyze

# ---------------------------------------------------------------------------
# multiplication tables: table[i, j, k] = coefficient of e_k in e_i e_j

QUATERNION_TRIPLES = ((1, 2, 3),)
OCTONION_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


def _cayley_table(dim: int, triples) -> np.ndarray:
    t = np.zeros((dim, dim, dim))
    for i in range(dim):
        t[0, i, i] = t[i, 0, i] = 1.0
    for i in range(1, dim):
        t[i, i, 0] = -1.0
    for a, b, c in triples:
        # e_a e_b = e_c and cyclic, with the reversed products negated
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            t[x, y, z] = 1.0
            t[y, x, z] = -1.0
    return t


QUATERNION_TABLE = _cayley_table(4, QUATERNION_TRIPLES)
OCTONION_TABLE = _cayley_table(8, OCTONION_TRIPLES)


def _conj(x):
    sign = np.ones(x.shape[-1])
    sign[1:] = -1.0
    return x * sign


@dataclass(frozen=True)
class _Algebra:
    coeffs: np.ndarray

    TABLE = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.TABLE.shape[0],):
            raise ValueError(f"expected {self.TABLE.shape[0]} coefficients")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, i: int):
        c = np.zeros(cls.TABLE.shape[0])
        c[i] = 1.0
        return cls(c)

    def __mul__(self, other):
        return type(self)(jets.bilinear(self.coeffs, other.coeffs, self.TABLE))

    def __add__(self, other):
        return type(self)(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return type(self)(self.coeffs - other.coeffs)

    def conj(self):
        return type(self)(_conj(self.coeffs))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


class Quaternion(_Algebra):
    TABLE = QUATERNION_TABLE


class Octonion(_Algebra):
    TABLE = OCTONION_TABLE


def quaternion_mul(x, y):
    return jets.bilinear(x, y, QUATERNION_TABLE)


def octonion_mul(x, y):
    """Product of octonions given as coefficient arrays (last axis of length 8), jets allowed."""
    if isinstance(x, Octonion):
        return x * y
    return jets.bilinear(x, y, OCTONION_TABLE)


def associator(x, y, z, table):
    xy = jets.bilinear(x, y, table)
    yz = jets.bilinear(y, z, table)
    return jets.bilinear(xy, z, table) - jets.bilinear(x, yz, table)


# ---------------------------------------------------------------------------
# Hopf maps


class HopfComplex(SphereMap):
    """(z1, z2) -> (2 z1 conj(z2), |z1|^2 - |z2|^2)/2, rescaled to radius target_radius."""

    source_dim, target_dim = 3, 2

    def __init__(self, target_radius: float = 0.5):
        self.target_radius = float(target_radius)
        self.name = f"hopf-complex(r={target_radius:g})"

    def __call__(self, x):
        x0, x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
        k = 2.0 * self.target_radius  # the unscaled image has radius 1/2
        re = x0 * x2 + x1 * x3
        im = x1 * x2 - x0 * x3
        h = (x0 * x0 + x1 * x1 - x2 * x2 - x3 * x3) * 0.5
        return jets.stack([re * k, im * k, h * k])


class _DivisionHopf(SphereMap):
    TABLE = None

    def __init__(self):
        self.target_radius = 0.5

    def __call__(self, x):
        d = self.TABLE.shape[0]
        u, v = x[..., :d], x[..., d:]
        prod = jets.bilinear(_conj(u), v, self.TABLE)
        h = (jets.norm2(u) - jets.norm2(v)) * 0.5
        comps = [prod[..., i] for i in range(d)]
        return jets.stack(comps + [h])


class HopfQuaternionic(_DivisionHopf):
    """(q1, q2) -> (2 conj(q1) q2, |q1|^2 - |q2|^2)/2 onto S^4(1/2)."""

    source_dim, target_dim = 7, 4
    TABLE = QUATERNION_TABLE
    name = "hopf-quaternionic"


class HopfOctonionic(_DivisionHopf):
    """(x, y) -> (2 conj(x) y, |x|^2 - |y|^2)/2 onto S^8(1/2)."""

    source_dim, target_dim = 15, 8
    TABLE = OCTONION_TABLE
    name = "hopf-octonionic"


def left_multiplication_frame(p, table) -> np.ndarray:
    """zeta_i = -J_i p where J_i multiplies both halves of p on the left by e_i."""
    p = coords_of(p)
    d = table.shape[0]
    out = []
    for i in range(1, d):
        e = np.zeros(d)
        e[i] = 1.0
        out.append(-np.concatenate([jets.bilinear(e, p[:d], table), jets.bilinear(e, p[d:], table)]))
    return np.array(out)


def horizontal_frame(p, vertical: np.ndarray) -> np.ndarray:
    """Gram-Schmidt of the ambient axes against p and the vertical vectors."""
    p = coords_of(p)
    basis = [p / np.linalg.norm(p)] + [v / np.linalg.norm(v) for v in vertical]
    out = []
    for axis in np.eye(p.shape[0]):
        r = axis.copy()
        for b in basis + out:
            r -= (b @ r) * b
        if np.linalg.norm(r) > 1e-6:
            out.append(r / np.linalg.norm(r))
    return np.array(out)


# ---------------------------------------------------------------------------
# Moebius maps


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` style entries such as ``2``, ``-1.5i``, ``0.5-2i``."""
    t = text.strip().replace(" ", "").replace("I", "i")
    if not t:
        raise ValueError("empty complex entry")
    return complex(t.replace("i", "j"))


@dataclass(frozen=True)
class MoebiusMap:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("Moebius matrix must be 2x2")
        if abs(np.linalg.det(m)) < 1e-14:
            raise ValueError("Moebius matrix must be invertible")
        object.__setattr__(self, "m", m)

    @classmethod
    def from_string(cls, text: str) -> MoebiusMap:
        parts = text.split(",")
        if len(parts) != 4:
            raise ValueError("expected four comma-separated entries a,b,c,d")
        return cls(np.array([parse_complex(x) for x in parts]).reshape(2, 2))

    @classmethod
    def dilation(cls, factor: float) -> MoebiusMap:
        """z -> factor * z, normalised to determinant one."""
        r = np.sqrt(factor)
        return cls(np.diag([r, 1.0 / r]))

    def apply(self, z: complex) -> complex:
        (a, b), (c, d) = self.m
        return (a * z + b) / (c * z + d)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        m = self.m / np.sqrt(np.linalg.det(self.m))
        return bool(np.allclose(m.conj().T @ m, np.eye(2), atol=tol))


class HopfComposedMoebius(SphereMap):
    """p -> Hopf(M z / |M z|) with z = (z1, z2) and M the Moebius matrix.

    Since M acts linearly on C^2 before the quotient, the composition with the
    complex Hopf map is smooth everywhere.
    """

    source_dim, target_dim = 3, 2

    def __init__(self, moebius: MoebiusMap, target_radius: float = 0.5):
        self.moebius = moebius if isinstance(moebius, MoebiusMap) else MoebiusMap(moebius)
        self.hopf = HopfComplex(target_radius)
        self.target_radius = float(target_radius)
        self.name = "hopf-moebius"

    def lift(self, x):
        (a, b), (c, d) = self.moebius.m
        z1 = x[..., 0] + 1j * x[..., 1]
        z2 = x[..., 2] + 1j * x[..., 3]
        w1 = z1 * a + z2 * b
        w2 = z1 * c + z2 * d
        r = jets.sqrt(jets.abs2(w1) + jets.abs2(w2))
        w1, w2 = w1 / r, w2 / r
        return jets.stack([jets.real(w1), jets.imag(w1), jets.real(w2), jets.imag(w2)])

    def __call__(self, x):
        return self.hopf(self.lift(x))


def _stereo(q_hat):
    """Affine coordinate of a unit vector in the chart matching z = z1/z2 of the Hopf map."""
    return complex(q_hat[0], q_hat[1]) / (1.0 - q_hat[2])


def _stereo_south(q_hat):
    return complex(q_hat[0], -q_hat[1]) / (1.0 + q_hat[2])


def _lambda_affine(m, z):
    (a, b), (c, d) = m
    return abs(np.linalg.det(m)) * (1 + abs(z) ** 2) / (abs(c * z + d) ** 2 + abs(a * z + b) ** 2)


def _chart_of(q):
    """(coordinate, matrix in that coordinate) choosing the pole away from q."""
    q = coords_of(q)
    q_hat = q / np.linalg.norm(q)
    if q_hat[2] < 1.0 - 1e-12:
        z = _stereo(q_hat)
        if abs(z) <= 10.0:
            return z, "north"
    if q_hat[2] > -1.0 + 1e-12:
        return _stereo_south(q_hat), "south"
    raise PoleSwapExhausted("both stereographic charts degenerate")


def moebius_conformal_factor(moebius: MoebiusMap, q) -> float:
    """Conformal factor of the Moebius map at q as a self-map of a round sphere."""
    z, chart = _chart_of(q)
    m = moebius.m if chart == "north" else moebius.m[:, ::-1]
    return float(_lambda_affine(m, z))


def moebius_gradient_norm(moebius: MoebiusMap, q, radius: float = 0.5, step: float = 1e-4) -> float:
    """|grad lambda| on the sphere of the given radius, by chart central differences."""
    z, chart = _chart_of(q)
    m = moebius.m if chart == "north" else moebius.m[:, ::-1]

    def grad(h):
        gx = (_lambda_affine(m, z + h) - _lambda_affine(m, z - h)) / (2 * h)
        gy = (_lambda_affine(m, z + 1j * h) - _lambda_affine(m, z - 1j * h)) / (2 * h)
        return np.array([gx, gy])

    g = (4 * grad(step / 2) - grad(step)) / 3
    # metric (2 radius)^2 |dz|^2 / (1+|z|^2)^2 in either affine chart
    return float(np.linalg.norm(g) * (1 + abs(z) ** 2) / (2 * radius))


def composed_norm_formula(lam: float, grad_lam: float) -> float:
    return 4 * (lam**2 * (1 + lam**2) + grad_lam**2) / (1 + lam**2) ** 3


@dataclass(frozen=True)
class ComposedCheck:
    max_residual: float
    measured: np.ndarray
    predicted: np.ndarray


def composed_invariant_check(moebius: MoebiusMap, samples: int, rng=None, points=None) -> ComposedCheck:
    """Compare |A_G|^2 of Hopf o Moebius with the closed conformal-factor formula."""
    rng = np.random.default_rng(0) if rng is None else rng
    pts = sample_sphere(rng, 3, samples) if points is None else points
    G = HopfComposedMoebius(moebius)
    hopf = HopfComplex(0.5)
    meas, pred = [], []
    for p in pts:
        meas.append(analyze(G, p)[2].normA2)
        q = hopf(p)
        lam = moebius_conformal_factor(moebius, q)
        meas_grad = moebius_gradient_norm(moebius, q)
        pred.append(composed_norm_formula(lam, meas_grad))
    meas, pred = np.array(meas), np.array(pred)
    return ComposedCheck(float(np.max(np.abs(meas - pred))), meas, pred)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantStats:
    mean_normA2: float
    max_deviation: float
    max_normH: float
    values: np.ndarray


def invariant_scan(f: SphereMap, samples: int, expected: float | None = None, rng=None) -> InvariantStats:
    rng = np.random.default_rng(0) if rng is None else rng
    pts = sample_sphere(rng, f.source_dim, samples)
    vals, hs = [], []
    for p in pts:
        _, _, forms = analyze(f, p)
        vals.append(forms.normA2)
        hs.append(forms.normH)
    vals = np.array(vals)
    ref = float(np.mean(vals)) if expected is None else expected
    return InvariantStats(float(np.mean(vals)), float(np.max(np.abs(vals - ref))), float(np.max(hs)), vals)


EXPECTED_NORM_A2 = {"complex": 1.0, "quaternionic": 6.0, "octonionic": 28.0}


def hopf_variant(name: str, target_radius: float = 0.5) -> SphereMap:
    if name == "complex":
        return HopfComplex(target_radius)
    if name == "quaternionic":
        return HopfQuaternionic()
    if name == "octonionic":
        return HopfOctonionic()
    raise ValueError(f"unknown Hopf variant {name!r}")


__all__ = [
    "HopfComplex",
    "HopfComposedMoebius",
    "HopfOctonionic",
    "HopfQuaternionic",
    "MoebiusMap",
    "Octonion",
    "Quaternion",
    "associator",
    "composed_invariant_check",
    "horizontal_frame",
    "invariant_scan",
    "left_multiplication_frame",
    "moebius_conformal_factor",
    "moebius_gradient_norm",
    "octonion_mul",
    "quaternion_mul",
]
