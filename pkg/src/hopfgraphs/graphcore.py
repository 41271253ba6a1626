"""Graph geometry of a map between round spheres.

For ``f: S^m -> S^n(r)`` the graph ``x -> (x, f(x))`` sits in the product
``S^m x S^n(r)`` with induced metric ``g = g_M + f^* g_N``.  This module
computes the singular value decomposition of ``df`` and the adapted graph
frames, the Hessian ``B`` of ``f``, the second fundamental form ``A`` of the
graph and its mean curvature ``H``.

Product-space vectors are stored as concatenated ambient coordinates
``(v_source, v_target)`` of length ``(m+1) + (n+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets
from .charts import coords_of, great_circle_jet, tangent_basis, tangential
from .errors import NumericalBreakdown, RankDeficient

CLUSTER_TOL = 1e-8  # singular values closer than this are treated as equal
RANK_TOL = 1e-10
KERNEL_TOL = 1e-8


class SphereMap:
    """A smooth map S^source_dim -> S^target_dim(target_radius).

    Subclasses implement :meth:`__call__` on ambient coordinates with the
    coordinate axis last; the same code must accept numpy arrays and
    :class:`~hopfgraphs.jets.Jet` objects.
    """

    source_dim: int = 3
    target_dim: int = 2
    target_radius: float = 1.0
    name: str = "map"

    def __call__(self, x):  # pragma: no cover - interface
        raise NotImplementedError

    def evaluate(self, p):
        return self(coords_of(p))


class IdentityMap(SphereMap):
    def __init__(self, dim: int = 3):
        self.source_dim = self.target_dim = dim
        self.target_radius = 1.0
        self.name = f"identity(S^{dim})"

    def __call__(self, x):
        return x


class ConstantMap(SphereMap):
    def __init__(self, value, source_dim: int = 3):
        value = np.asarray(value, dtype=float)
        self.value = value
        self.source_dim = source_dim
        self.target_dim = value.shape[0] - 1
        self.target_radius = float(np.linalg.norm(value))
        self.name = "constant"

    def __call__(self, x):
        # 0*x keeps the jet structure so derivatives come out as zeros
        zero = (x[..., :1] * 0.0).sum(axis=-1)
        return jets.stack([zero + v for v in self.value])


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SingularData:
    """Singular value decomposition of df at one point, with graph frames.

    ``sigma`` is ascending; the first ``kernel_dim`` entries belong to the
    kernel.  Row ``a`` of ``beta`` pairs with row ``kernel_dim + a`` of
    ``alpha``.
    """

    point: np.ndarray
    image: np.ndarray
    sigma: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    e: np.ndarray
    xi: np.ndarray
    kernel_dim: int
    near_conformal: bool = False
    df: np.ndarray = field(default=None, repr=False)

    @property
    def lam(self) -> float:
        return float(self.sigma[-2])

    @property
    def mu(self) -> float:
        return float(self.sigma[-1])

    @property
    def paired_sigma(self) -> np.ndarray:
        return self.sigma[self.kernel_dim:]

    @property
    def source_size(self) -> int:
        return self.point.shape[0]

    def graph_metric(self, u, v):
        """g(u, v) = <u, v> + <df u, df v> for ambient source vectors."""
        return u @ v + (self.df @ u) @ (self.df @ v)


def _tie_break(vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(vectors) built from ambient axes."""
    k, n = vectors.shape
    q, _ = np.linalg.qr(vectors.T)
    proj = q @ q.T
    chosen: list[np.ndarray] = []
    for axis in range(n):
        r = proj[:, axis].copy()
        for c in chosen:
            r -= (c @ r) * c
        nr = np.linalg.norm(r)
        if nr > 1e-6:
            chosen.append(r / nr)
        if len(chosen) == k:
            break
    # a second Gram-Schmidt pass cleans up rounding from the projector
    out = []
    for c in chosen:
        for o in out:
            c = c - (o @ c) * o
        out.append(c / np.linalg.norm(c))
    return np.array(out)


def _clusters(sigma: np.ndarray, kernel_dim: int):
    groups = []
    if kernel_dim > 1:
        groups.append(list(range(kernel_dim)))
    i = kernel_dim
    while i < len(sigma):
        j = i
        while j + 1 < len(sigma) and sigma[j + 1] - sigma[j] < CLUSTER_TOL * max(1.0, sigma[j + 1]):
            j += 1
        if j > i:
            groups.append(list(range(i, j + 1)))
        i = j + 1
    return groups


def singular_decompose(f: SphereMap, p, strict: bool = True, backend: str = "jet") -> SingularData:
    p = coords_of(p)
    T = tangent_basis(p)
    m = T.shape[0]
    n = f.target_dim
    first, _ = great_circle_jet(f, np.broadcast_to(p, T.shape), T, backend=backend)
    image = np.asarray(f(p), dtype=float)
    D = first.T  # (n+1) x m, columns df(t_i)
    w, U = np.linalg.eigh(D.T @ D)
    w = np.clip(w, 0.0, None)
    sigma = np.sqrt(w)
    kernel_dim = max(m - n, 0)
    scale = max(1.0, float(w[-1]))
    if kernel_dim and w[kernel_dim - 1] > KERNEL_TOL * scale:
        raise NumericalBreakdown(f"expected a {kernel_dim}-dimensional kernel, smallest eigenvalues {w[:kernel_dim]}")
    sigma[:kernel_dim] = 0.0
    if strict and sigma[-1] < RANK_TOL:
        raise RankDeficient("df vanishes at this point")

    alpha = U.T @ T
    for group in _clusters(sigma, kernel_dim):
        alpha[group] = _tie_break(alpha[group])
    near_conformal = bool(n >= 2 and m >= 2 and abs(sigma[-1] - sigma[-2]) < CLUSTER_TOL)

    dfm = D @ T  # ambient matrix of df, zero on p
    beta = np.zeros((n, n + 1))
    q_hat = image / np.linalg.norm(image)
    target_basis = tangent_basis(q_hat)
    for a in range(n):
        i = kernel_dim + a
        if sigma[i] > RANK_TOL:
            beta[a] = dfm @ alpha[i] / sigma[i]
    for a in range(n):
        if sigma[kernel_dim + a] <= RANK_TOL:
            for cand in target_basis:
                r = cand - sum((b @ cand) * b for b in beta if np.any(b))
                if np.linalg.norm(r) > 1e-6:
                    beta[a] = r / np.linalg.norm(r)
                    break

    if (m, n) == (3, 2):
        # orientation: (f(p), beta_2, beta_3) and (p, alpha_1, alpha_2, alpha_3) positive
        if np.linalg.det(np.array([q_hat, beta[0], beta[1]])) < 0:
            alpha[2], beta[1] = -alpha[2], -beta[1]
        if np.linalg.det(np.vstack([p, alpha])) < 0:
            alpha[0] = -alpha[0]

    rho = 1.0 / np.sqrt(1.0 + sigma**2)
    e = np.zeros((m, p.shape[0] + n + 1))
    for i in range(m):
        e[i] = np.concatenate([alpha[i], dfm @ alpha[i]]) * rho[i]
    xi = np.zeros((n, p.shape[0] + n + 1))
    for a in range(n):
        i = kernel_dim + a
        xi[a] = np.concatenate([-sigma[i] * alpha[i], beta[a]]) * rho[i]
    return SingularData(p, image, sigma, alpha, beta, e, xi, kernel_dim, near_conformal, dfm)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HessianData:
    """vectors[i, j] = B(alpha_i, alpha_j) in target ambient coordinates; b[a, i, j] against beta_a."""

    vectors: np.ndarray
    b: np.ndarray


def _probe_directions(alpha: np.ndarray):
    m = alpha.shape[0]
    dirs = [alpha[i] for i in range(m)]
    pairs = []
    for i in range(m):
        for j in range(i + 1, m):
            pairs.append((i, j, len(dirs)))
            dirs.append((alpha[i] + alpha[j]) / np.sqrt(2.0))
            dirs.append((alpha[i] - alpha[j]) / np.sqrt(2.0))
    return np.array(dirs), pairs


def hessian_B(f: SphereMap, p, data: SingularData, backend: str = "jet") -> HessianData:
    p = coords_of(p)
    dirs, pairs = _probe_directions(data.alpha)
    _, second = great_circle_jet(f, np.broadcast_to(p, dirs.shape), dirs, backend=backend)
    diag = tangential(second, data.image)
    m = data.alpha.shape[0]
    vec = np.zeros((m, m, diag.shape[-1]))
    for i in range(m):
        vec[i, i] = diag[i]
    for i, j, k in pairs:
        vec[i, j] = vec[j, i] = 0.5 * (diag[k] - diag[k + 1])
    b = np.einsum("ijt,at->aij", vec, data.beta)
    return HessianData(vec, b)


@dataclass(frozen=True)
class FundamentalForms:
    """Second fundamental form of the graph in the adapted frames.

    ``A[i, j]`` is the product-space vector A(e_i, e_j); ``h[a, i, j]`` its
    component along xi_a and ``b`` the Hessian components against beta_a.
    """

    b: np.ndarray
    h: np.ndarray
    A: np.ndarray
    H: np.ndarray
    normA2: float

    @property
    def normH(self) -> float:
        return float(np.linalg.norm(self.H))

    def normA2_from_h(self) -> float:
        return float(np.sum(self.h**2))


def second_fundamental_form(f: SphereMap, p, data: SingularData, hess: HessianData) -> FundamentalForms:
    sigma = data.sigma
    rho = 1.0 / np.sqrt(1.0 + sigma**2)
    src = data.point.shape[0]
    paired = data.alpha[data.kernel_dim:]
    sp = data.paired_sigma
    # ambient operators on the tangent spaces
    df_adj = (paired.T * sp) @ data.beta  # df^t : target tangent -> source tangent
    inv_src = (data.alpha.T * (1.0 / (1.0 + sigma**2))) @ data.alpha
    inv_tgt = (data.beta.T * (1.0 / (1.0 + sp**2))) @ data.beta
    m = sigma.shape[0]
    A = np.zeros((m, m, data.e.shape[1]))
    for i in range(m):
        for j in range(m):
            Bij = hess.vectors[i, j] * rho[i] * rho[j]
            A[i, j, :src] = -inv_src @ (df_adj @ Bij)
            A[i, j, src:] = inv_tgt @ Bij
    h = np.einsum("ijv,av->aij", A, data.xi)
    H = np.einsum("iiv->v", A)
    normA2 = float(np.sum(A**2))
    return FundamentalForms(hess.b, h, A, H, normA2)


def analyze(f: SphereMap, p, strict: bool = True, backend: str = "jet"):
    """Singular data, Hessian and fundamental forms at ``p`` in one call."""
    data = singular_decompose(f, p, strict=strict, backend=backend)
    hess = hessian_B(f, p, data, backend=backend)
    return data, hess, second_fundamental_form(f, p, data, hess)


def mean_curvature_residual(f: SphereMap, p, backend: str = "jet") -> float:
    return analyze(f, p, backend=backend)[2].normH


def graph_second_fundamental_form(f: SphereMap, p, data: SingularData) -> np.ndarray:
    """A(e_i, e_j) obtained by projecting curve accelerations onto the graph normal space.

    The graph curve t -> (gamma(t), f(gamma(t))) over a great circle gamma has
    acceleration whose component normal to the graph (inside the product
    tangent space) is A(gamma', gamma').  This does not use the Hessian
    formula, so it serves as an independent check.  Returns h[a, i, j].
    """
    p = coords_of(p)
    dirs, pairs = _probe_directions(data.alpha)
    _, second = great_circle_jet(f, np.broadcast_to(p, dirs.shape), dirs)
    acc = np.concatenate([np.broadcast_to(-p, dirs.shape), second], axis=1)
    normal = acc @ data.xi.T  # components along xi_a
    m = data.alpha.shape[0]
    comp = np.zeros((m, m, normal.shape[1]))
    for i in range(m):
        comp[i, i] = normal[i]
    for i, j, k in pairs:
        comp[i, j] = comp[j, i] = 0.5 * (normal[k] - normal[k + 1])
    rho = 1.0 / np.sqrt(1.0 + data.sigma**2)
    return np.einsum("ija,i,j->aij", comp, rho, rho)


def graph_frames(data: SingularData, alpha: np.ndarray, beta: np.ndarray, sigma: np.ndarray, kernel_dim: int = 1):
    """Graph frames (e, xi) built from a caller-supplied SVD frame of df.

    ``alpha`` rows must diagonalise df with singular values ``sigma`` and
    ``beta[a]`` must equal df(alpha[kernel_dim + a]) / sigma up to the sign
    convention the caller chooses.
    """
    rho = 1.0 / np.sqrt(1.0 + np.asarray(sigma) ** 2)
    e = np.array([np.concatenate([alpha[i], data.df @ alpha[i]]) * rho[i] for i in range(len(alpha))])
    xi = np.array(
        [
            np.concatenate([-sigma[kernel_dim + a] * alpha[kernel_dim + a], beta[a]]) * rho[kernel_dim + a]
            for a in range(len(beta))
        ]
    )
    return e, xi


def reexpress_h(forms: FundamentalForms, data: SingularData, e_new: np.ndarray, xi_new: np.ndarray) -> np.ndarray:
    """Components of A against another orthonormal pair of graph frames."""
    E = e_new @ data.e.T  # product inner products, both frames g-orthonormal
    N = xi_new @ data.xi.T
    return np.einsum("ab,ik,jl,bkl->aij", N, E, E, forms.h)
