"""Angle functions, the Gauss-map tensor, and residual suites for the structure equations.

All identities concern a map ``f: S^3 -> S^2`` with singular values
``0 <= lam <= mu`` and the frames of :func:`graphcore.singular_decompose`.
Index conventions follow that module: ``alpha[0]`` spans the kernel, ``alpha[1]``
and ``alpha[2]`` pair with ``beta[0]`` and ``beta[1]``; normal index 4 is
``xi[0]`` and 5 is ``xi[1]``.  Left-hand sides are measured by differentiating
sign-aligned frame fields numerically; right-hand sides are assembled from the
second fundamental form at the base point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import ambient_to_chart, coords_of, directional_derivative
from .curvature import ChartGraph
from .errors import DenominatorUnderflow, NearConformalAmbiguity, NotMinimal
from .graphcore import (
    SingularData,
    SphereMap,
    analyze,
    graph_second_fundamental_form,
    singular_decompose,
)

GAP_TOL = 1e-6
MINIMAL_TOL = 1e-6
STEP = 1e-3


@dataclass(frozen=True)
class AngleFunctions:
    u1: float
    u2: float
    w: float

    @classmethod
    def from_singular(cls, lam: float, mu: float) -> AngleFunctions:
        u1 = 1.0 / np.sqrt((1 + lam * lam) * (1 + mu * mu))
        u2 = lam * mu * u1
        return cls(float(u1), float(u2), float(u1 + u2))


def angle_functions(f: SphereMap, p) -> AngleFunctions:
    data = singular_decompose(f, p, strict=False)
    return AngleFunctions.from_singular(data.lam, data.mu)


# ---------------------------------------------------------------------------
# frame fields near a base point


def _aligned_fields(f: SphereMap, x, ref: SingularData) -> dict:
    """Frames at ``x`` with signs matched to ``ref`` plus the scalar fields."""
    d = singular_decompose(f, x)
    signs = np.sign(np.sum(d.alpha * ref.alpha, axis=1))
    signs[signs == 0] = 1.0
    paired = signs[d.kernel_dim:]
    lam, mu = d.lam, d.mu
    ang = AngleFunctions.from_singular(lam, mu)
    rho = 1.0 / np.sqrt(1 + d.sigma**2)
    return {
        "alpha": d.alpha * signs[:, None],
        "beta": d.beta * paired[:, None],
        "e": d.e * signs[:, None],
        "xi": d.xi * paired[:, None],
        "src": d.alpha * (signs * rho)[:, None],  # source part of e_i
        "lam": np.float64(lam),
        "mu": np.float64(mu),
        "u1": np.float64(ang.u1),
        "u2": np.float64(ang.u2),
        "w": np.float64(ang.w),
    }


def _frame_derivatives(f: SphereMap, p, ref: SingularData, step: float = STEP) -> list[dict]:
    """Derivatives of every aligned field along alpha_1, alpha_2, alpha_3 at p."""
    return [directional_derivative(lambda x: _aligned_fields(f, x, ref), p, ref.alpha[i], step) for i in range(ref.alpha.shape[0])]


@dataclass
class LocalGeometry:
    """Everything measured at one base point: frames, forms and first derivatives."""

    data: SingularData
    b: np.ndarray  # b[a, i, j] Hessian against beta
    h: np.ndarray  # h[a, i, j] from graph-curve accelerations
    h_hessian: np.ndarray  # h from the Hessian formula
    normA2: float
    normH: float
    along_alpha: list[dict]

    @property
    def rho(self) -> np.ndarray:
        return 1.0 / np.sqrt(1 + self.data.sigma**2)


def local_geometry(f: SphereMap, p, step: float = STEP, require_gap: bool = True) -> LocalGeometry:
    p = coords_of(p)
    data, hess, forms = analyze(f, p)
    if require_gap and data.mu - data.lam < GAP_TOL:
        raise NearConformalAmbiguity(f"mu - lam = {data.mu - data.lam:.3e}")
    if data.lam < 1e-10:
        raise DenominatorUnderflow("lam vanishes; the identities divide by it")
    h = graph_second_fundamental_form(f, p, data)
    return LocalGeometry(data, hess.b, h, forms.h, forms.normA2, forms.normH, _frame_derivatives(f, p, data, step))


# ---------------------------------------------------------------------------
# residual assembly


@dataclass
class StructureFeed:
    """Inputs to the identity checks.  Indices are zero based (0 = kernel)."""

    lam: float
    mu: float
    b: np.ndarray  # (2, 3, 3)
    h: np.ndarray  # (2, 3, 3)
    dlam: np.ndarray  # alpha_i(lam)
    dmu: np.ndarray  # alpha_i(mu)
    alpha_conn: np.ndarray  # [i, j, k] = <nabla_{alpha_i} alpha_j, alpha_k>
    normal_conn: np.ndarray  # [i] = <nabla^perp_{e_i} xi_4, xi_5>
    graph_conn: np.ndarray  # [i, j, k] = g(nabla_{e_i} e_j, e_k)
    bracket: np.ndarray  # [0] = [e1, e2], [1] = [e1, e3], components along e_k
    phi: np.ndarray = field(default=None)  # (3, 2) direct Gauss tensor


def _identity_tables(feed: StructureFeed):
    """Right-hand sides of every identity as (name, measured, predicted) triples."""
    lam, mu, b, h = feed.lam, feed.mu, feed.b, feed.h
    r2, r3 = np.sqrt(1 + lam**2), np.sqrt(1 + mu**2)
    u1 = 1.0 / (r2 * r3)
    dl, dm = feed.dlam, feed.dmu
    # e_i(arctan x) = rho_i alpha_i(x) / (1 + x^2)
    rho = np.array([1.0, 1.0 / r2, 1.0 / r3])
    e_atl = rho * dl / (1 + lam**2)
    e_atm = rho * dm / (1 + mu**2)
    h4, h5 = h[0], h[1]
    b4, b5 = b[0], b[1]
    gap2 = mu**2 - lam**2
    out = []

    def add(group, name, measured, predicted):
        out.append((group, name, float(measured), float(predicted)))

    # dictionary between Hessian and second fundamental form
    add("dictionary", "b4_11", b4[0, 0], r2 * h4[0, 0])
    add("dictionary", "b4_12", b4[0, 1], dl[0])
    add("dictionary", "b4_13", b4[0, 2], r2 * r3 * h4[0, 2])
    add("dictionary", "b4_22", b4[1, 1], dl[1])
    add("dictionary", "b4_23", b4[1, 2], dl[2])
    add("dictionary", "b4_33", b4[2, 2], r3**2 * r2 * h4[2, 2])
    add("dictionary", "b5_11", b5[0, 0], r3 * h5[0, 0])
    add("dictionary", "b5_12", b5[0, 1], r2 * r3 * h5[0, 1])
    add("dictionary", "b5_13", b5[0, 2], dm[0])
    add("dictionary", "b5_22", b5[1, 1], r2**2 * r3 * h5[1, 1])
    add("dictionary", "b5_23", b5[1, 2], dm[1])
    add("dictionary", "b5_33", b5[2, 2], dm[2])
    add("dictionary", "h4_12", h4[0, 1], e_atl[0])
    add("dictionary", "h4_22", h4[1, 1], e_atl[1])
    add("dictionary", "h4_23", h4[1, 2], e_atl[2])
    add("dictionary", "h5_13", h5[0, 2], e_atm[0])
    add("dictionary", "h5_23", h5[1, 2], e_atm[1])
    add("dictionary", "h5_33", h5[2, 2], e_atm[2])

    c = feed.alpha_conn
    add("alpha_connection", "a1a1.a2", c[0, 0, 1], -r2 / lam * h4[0, 0])
    add("alpha_connection", "a1a1.a3", c[0, 0, 2], -r3 / mu * h5[0, 0])
    add("alpha_connection", "a1a2.a3", c[0, 1, 2], -(mu * h5[0, 1] + lam * h4[0, 2]) / (gap2 * u1))
    add("alpha_connection", "a2a1.a2", c[1, 0, 1], -dl[0] / lam)
    add("alpha_connection", "a2a1.a3", c[1, 0, 2], -h5[0, 1] / (mu * u1))
    add("alpha_connection", "a2a2.a3", c[1, 1, 2], -(u1 * lam * dl[2] + mu * r2 * h5[1, 1]) / (gap2 * u1))
    add("alpha_connection", "a3a1.a2", c[2, 0, 1], -h4[0, 2] / (lam * u1))
    add("alpha_connection", "a3a1.a3", c[2, 0, 2], -dm[0] / mu)
    add("alpha_connection", "a3a2.a3", c[2, 1, 2], -(u1 * mu * dm[1] + lam * r3 * h4[2, 2]) / (gap2 * u1))

    n = feed.normal_conn
    e_lam = rho * dl
    e_mu = rho * dm
    add("normal_connection", "e1", n[0], (lam * r3**2 * h5[0, 1] + mu * r2**2 * h4[0, 2]) / (-gap2))
    add("normal_connection", "e2", n[1], (mu * e_lam[2] + lam * r3**2 * h5[1, 1]) / (-gap2))
    add("normal_connection", "e3", n[2], (lam * e_mu[1] + mu * r2**2 * h4[2, 2]) / (-gap2))

    g = feed.graph_conn
    add("graph_connection", "e1e1.e2", g[0, 0, 1], -h4[0, 0] / lam)
    add("graph_connection", "e1e1.e3", g[0, 0, 2], -h5[0, 0] / mu)
    add("graph_connection", "e1e2.e3", g[0, 1, 2], -(r2**2 * mu * h5[0, 1] + lam * r3**2 * h4[0, 2]) / gap2)
    add("graph_connection", "e2e1.e2", g[1, 0, 1], -e_atl[0] / lam)
    add("graph_connection", "e2e1.e3", g[1, 0, 2], -h5[0, 1] / mu)
    add("graph_connection", "e2e2.e3", g[1, 1, 2], -(mu * r2**2 * h5[1, 1] + lam * r3**2 * e_atl[2]) / gap2)
    add("graph_connection", "e3e1.e2", g[2, 0, 1], -h4[0, 2] / lam)
    add("graph_connection", "e3e1.e3", g[2, 0, 2], -e_atm[0] / mu)
    add("graph_connection", "e3e2.e3", g[2, 1, 2], -(mu * r2**2 * e_atm[1] + lam * r3**2 * h4[2, 2]) / gap2)

    mix = lam * h5[0, 1] + mu * h4[0, 2]
    br = feed.bracket
    add("bracket", "e1e2.e1", br[0, 0], h4[0, 0] / lam)
    add("bracket", "e1e2.e2", br[0, 1], e_atl[0] / lam)
    add("bracket", "e1e2.e3", br[0, 2], lam * r3**2 / (mu * (-gap2)) * mix)
    add("bracket", "e1e3.e1", br[1, 0], h5[0, 0] / mu)
    add("bracket", "e1e3.e2", br[1, 1], mu * r2**2 / (lam * gap2) * mix)
    add("bracket", "e1e3.e3", br[1, 2], e_atm[0] / mu)

    if feed.phi is not None:
        for i in range(3):
            add("gauss_tensor", f"phi{i + 1}2", feed.phi[i, 0], h4[0, i] / lam)
            add("gauss_tensor", f"phi{i + 1}3", feed.phi[i, 1], h5[0, i] / mu)
    return out


@dataclass(frozen=True)
class Residual:
    group: str
    name: str
    measured: float
    predicted: float

    @property
    def value(self) -> float:
        return abs(self.measured - self.predicted)


def assemble_residuals(feed: StructureFeed) -> list[Residual]:
    return [Residual(*row) for row in _identity_tables(feed)]


def measure_feed(geo: LocalGeometry) -> StructureFeed:
    """Left-hand sides of the identities by numerical differentiation at the base point."""
    d = geo.data
    D = geo.along_alpha
    rho = geo.rho
    alpha_conn = np.array([[[D[i]["alpha"][j] @ d.alpha[k] for k in range(3)] for j in range(3)] for i in range(3)])
    normal_conn = np.array([rho[i] * (D[i]["xi"][0] @ d.xi[1]) for i in range(3)])
    graph_conn = np.array([[[rho[i] * (D[i]["e"][j] @ d.e[k]) for k in range(3)] for j in range(3)] for i in range(3)])
    # Lie brackets of the source vector fields, paired with the graph metric
    src = rho[:, None] * d.alpha
    bracket = np.zeros((2, 3))
    for row, j in enumerate((1, 2)):
        lie = rho[0] * D[0]["src"][j] - rho[j] * D[j]["src"][0]
        bracket[row] = [d.graph_metric(lie, src[k]) for k in range(3)]
    phi = -graph_conn[:, 0, 1:]
    return StructureFeed(
        lam=d.lam,
        mu=d.mu,
        b=geo.b,
        h=geo.h,
        dlam=np.array([D[i]["lam"] for i in range(3)], dtype=float),
        dmu=np.array([D[i]["mu"] for i in range(3)], dtype=float),
        alpha_conn=alpha_conn,
        normal_conn=normal_conn,
        graph_conn=graph_conn,
        bracket=bracket,
        phi=phi,
    )


def structure_residuals(f: SphereMap, p, step: float = STEP) -> list[Residual]:
    """Per-identity residuals at ``p``; raises NearConformalAmbiguity when mu - lam < 1e-6."""
    return assemble_residuals(measure_feed(local_geometry(f, p, step)))


# ---------------------------------------------------------------------------
# Gauss map tensor


@dataclass(frozen=True)
class GaussTensor:
    """phi[i, j] = g(phi(e_i), e_{j+2}) for j = 0, 1, with phi = -nabla^g e_1."""

    phi: np.ndarray
    phi_from_h: np.ndarray
    discrepancy: float

    @property
    def re_parts(self) -> np.ndarray:
        return self.phi[:, 0]

    @property
    def im_parts(self) -> np.ndarray:
        return self.phi[:, 1]


def gauss_tensor(f: SphereMap, p, accept_tie_break: bool = False, step: float = STEP) -> GaussTensor:
    p = coords_of(p)
    data, _, forms = analyze(f, p)
    if data.mu - data.lam < GAP_TOL and not accept_tie_break:
        raise NearConformalAmbiguity(f"mu - lam = {data.mu - data.lam:.3e}")
    rho = 1.0 / np.sqrt(1 + data.sigma**2)
    phi = np.zeros((3, 2))
    for i in range(3):
        de1 = directional_derivative(lambda x: _aligned_fields(f, x, data)["e"][0], p, data.alpha[i], step)
        phi[i] = [-rho[i] * (de1 @ data.e[j]) for j in (1, 2)]
    h = forms.h
    with np.errstate(divide="ignore", invalid="ignore"):
        from_h = np.column_stack([h[0, 0, :] / data.lam, h[1, 0, :] / data.mu])
    return GaussTensor(phi, from_h, float(np.max(np.abs(phi - from_h))))


def pinching_quantity(f: SphereMap, p) -> float:
    """(mu - lam)(sum_k (h5_1k)^2 / mu - sum_k (h4_1k)^2 / lam); zero when lam = mu."""
    data, _, forms = analyze(f, p)
    lam, mu = data.lam, data.mu
    if mu - lam == 0.0:
        return 0.0
    h = forms.h
    return float((mu - lam) * (np.sum(h[1, 0] ** 2) / mu - np.sum(h[0, 0] ** 2) / lam))


def pinching_from_phi(gt: GaussTensor, lam: float, mu: float) -> float:
    """(mu - lam)(mu |Im phi|^2 - lam |Re phi|^2)."""
    return float((mu - lam) * (mu * np.sum(gt.im_parts**2) - lam * np.sum(gt.re_parts**2)))


# ---------------------------------------------------------------------------
# Bochner formulas


def _angle_value(f, x, key):
    d = singular_decompose(f, x)
    return getattr(AngleFunctions.from_singular(d.lam, d.mu), key)


def frame_laplacian(f: SphereMap, p, key: str, ref: SingularData, step: float = STEP) -> tuple[float, np.ndarray]:
    """(Laplacian, gradient components e_k(u)) of an angle function via the e-frame formula."""
    p = coords_of(p)
    rho = 1.0 / np.sqrt(1 + ref.sigma**2)
    grad = np.array([directional_derivative(lambda x: _angle_value(f, x, key), p, rho[k] * ref.alpha[k], step) for k in range(3)], dtype=float)
    lap = 0.0
    for i in range(3):

        def e_i_u(x, i=i):
            v = _aligned_fields(f, x, ref)["src"][i]
            return directional_derivative(lambda z: _angle_value(f, z, key), x, v, step)

        second = float(directional_derivative(e_i_u, p, rho[i] * ref.alpha[i], step))
        de = directional_derivative(lambda x, i=i: _aligned_fields(f, x, ref)["e"][i], p, rho[i] * ref.alpha[i], step)
        conn = np.array([de @ ref.e[k] for k in range(3)])
        lap += second - conn @ grad
    return float(lap), grad


def chart_laplacian(f: SphereMap, p, key: str, step: float = STEP) -> float:
    """Laplace-Beltrami of an angle function in Hopf coordinates of the graph metric."""
    c = ambient_to_chart(p)
    y0 = np.array([c.xi, c.eta, c.s])
    cg = ChartGraph(f, step=step)
    g_inv = np.linalg.inv(cg.metric(y0))
    gamma = cg.christoffel(y0)

    def u(y):
        return _angle_value(f, np.asarray(cg.chart(y)), key)

    def hessian(hs):
        H = np.zeros((3, 3))
        grad = np.zeros(3)
        u0 = u(y0)
        E = np.eye(3) * hs
        for i in range(3):
            up, um = u(y0 + E[i]), u(y0 - E[i])
            grad[i] = (up - um) / (2 * hs)
            H[i, i] = (up - 2 * u0 + um) / hs**2
            for j in range(i + 1, 3):
                H[i, j] = H[j, i] = (u(y0 + E[i] + E[j]) - u(y0 + E[i] - E[j]) - u(y0 - E[i] + E[j]) + u(y0 - E[i] - E[j])) / (4 * hs**2)
        return H, grad

    H1, g1 = hessian(step)
    H2, g2 = hessian(step / 2)
    H, grad = (4 * H2 - H1) / 3, (4 * g2 - g1) / 3
    return float(np.einsum("ij,ij->", g_inv, H - np.einsum("kij,k->ij", gamma, grad)))


@dataclass(frozen=True)
class BochnerReport:
    gradU1: float
    lapU1: float
    gradU2: float
    lapU2: float
    gradW: float
    lapW: float
    laplacian_paths: float  # max disagreement between frame and chart Laplacians
    measured: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("gradU1", "lapU1", "gradU2", "lapU2", "gradW", "lapW", "laplacian_paths")}


def bochner_rhs(lam: float, mu: float, h: np.ndarray, normA2: float) -> dict:
    """Right-hand sides of the gradient and Laplacian formulas for u1, u2 and w."""
    ang = AngleFunctions.from_singular(lam, mu)
    u1, u2, w = ang.u1, ang.u2, ang.w
    h4, h5 = h[0], h[1]
    cross = float(np.sum(h4[1, :] * h5[2, :] - h5[1, :] * h4[2, :]))
    grad_u1 = -u1 * (lam * h4[:, 1] + mu * h5[:, 2])
    grad_u2 = u1 * (mu * h4[:, 1] + lam * h5[:, 2])
    lap_u1 = -normA2 * u1 + 2 * lam * mu * u1 * cross - 2 * (lam**2 + mu**2) * u1**3
    col = float(np.sum(h[:, :, 1] ** 2) + np.sum(h[:, :, 2] ** 2))
    s4 = float(np.sum(h4[0, :] ** 2))
    s5 = float(np.sum(h5[0, :] ** 2))
    lap_u2 = -u2 * col + 2 * u1 * cross + 4 * u1**2 * u2 + mu * u1 * s4 / lam + lam * u1 * s5 / mu
    sq1 = (h4[0, 1] - h5[0, 2]) ** 2 + (h4[1, 2] - h5[2, 2]) ** 2 + (h4[1, 1] - h5[1, 2]) ** 2
    sq2 = (h4[1, 2] + h5[1, 1]) ** 2 + (h5[0, 1] + h4[0, 2]) ** 2 + (h4[2, 2] + h5[2, 1]) ** 2
    grad_w_sq = (mu - lam) ** 2 * u1**2 * sq1
    lap_w = -w * sq1 - w * sq2 - (mu - lam) * u1 * (s5 / mu - s4 / lam) - 2 * (mu - lam) ** 2 * u1**3
    return {"gradU1": grad_u1, "gradU2": grad_u2, "lapU1": lap_u1, "lapU2": lap_u2, "gradWsq": grad_w_sq, "lapW": lap_w}


def bochner_residuals(f: SphereMap, p, step: float = STEP, chart_check: bool = True) -> BochnerReport:
    """|LHS - RHS| for the six Bochner-type formulas at a point of a minimal graph."""
    p = coords_of(p)
    data, _, forms = analyze(f, p)
    if forms.normH > MINIMAL_TOL:
        raise NotMinimal(f"|H| = {forms.normH:.3e} exceeds {MINIMAL_TOL}")
    if data.lam < 1e-10:
        raise DenominatorUnderflow("lam vanishes; the formulas for u2 divide by it")
    rhs = bochner_rhs(data.lam, data.mu, forms.h, forms.normA2)
    measured = {}
    paths = 0.0
    for key in ("u1", "u2", "w"):
        lap, grad = frame_laplacian(f, p, key, data, step)
        measured[key] = (lap, grad)
        if chart_check:
            paths = max(paths, abs(lap - chart_laplacian(f, p, key, step)))
    (lu1, gu1), (lu2, gu2), (lw, gw) = measured["u1"], measured["u2"], measured["w"]
    return BochnerReport(
        gradU1=float(np.max(np.abs(gu1 - rhs["gradU1"]))),
        lapU1=abs(lu1 - rhs["lapU1"]),
        gradU2=float(np.max(np.abs(gu2 - rhs["gradU2"]))),
        lapU2=abs(lu2 - rhs["lapU2"]),
        gradW=abs(float(np.sqrt(gw @ gw)) - float(np.sqrt(rhs["gradWsq"]))),
        lapW=abs(lw - rhs["lapW"]),
        laplacian_paths=paths,
        measured={"lapU1": lu1, "lapU2": lu2, "lapW": lw, "gradW": float(np.sqrt(gw @ gw))},
    )
