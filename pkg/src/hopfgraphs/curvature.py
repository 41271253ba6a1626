"""Chart-based intrinsic and extrinsic curvature of a graph in S^3 x S^2.

Everything here works in a coordinate chart ``P: R^3 -> S^3`` and the graph
embedding ``Phi(y) = (P(y), f(P(y)))``.  First and second partials of
``Phi`` come from exact jets; Christoffel symbols and curvature come from
Richardson-extrapolated central differences of the metric.  These routines
check the Gauss and Codazzi equations and the relation between the graph
connection and the source connection.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import jets
from .charts import hopf_chart_coords
from .graphcore import SphereMap, analyze, singular_decompose

FD_STEP = 1e-3


def hopf_chart(y):
    """(xi, eta, s) -> point of S^3; jet-aware."""
    return hopf_chart_coords(y[..., 0], y[..., 1], y[..., 2])


def _richardson(fn: Callable, y: np.ndarray, step: float):
    """Partial derivatives of an array-valued fn at y; output axis 0 is the coordinate."""
    dim = y.shape[0]

    def cd(h):
        out = []
        for i in range(dim):
            d = np.zeros(dim)
            d[i] = h
            out.append((fn(y + d) - fn(y - d)) / (2 * h))
        return np.array(out)

    return (4 * cd(step / 2) - cd(step)) / 3


@dataclass
class ChartGraph:
    """Graph of ``f`` pulled back to chart coordinates ``y``."""

    f: SphereMap
    chart: Callable = hopf_chart
    step: float = FD_STEP

    def embedding(self, y):
        x = self.chart(y)
        return jets.stack([x[..., i] for i in range(x.shape[-1])] + [self.f(x)[..., i] for i in range(self.f.target_dim + 1)])

    def partials(self, y):
        """(first[i], second[i, j]) of Phi at y as ambient product vectors."""
        y = np.asarray(y, dtype=float)
        dim = y.shape[0]
        eye = np.eye(dim)
        dirs = [eye[i] for i in range(dim)]
        pairs = []
        for i in range(dim):
            for j in range(i + 1, dim):
                pairs.append((i, j, len(dirs)))
                dirs.append(eye[i] + eye[j])
        dirs = np.array(dirs)
        jet = jets.Jet.variable(np.broadcast_to(y, dirs.shape), dirs, 2)
        out = self.embedding(jet)
        d1, d2 = out.derivative(1), out.derivative(2)
        first = d1[:dim]
        second = np.zeros((dim, dim, first.shape[-1]))
        for i in range(dim):
            second[i, i] = d2[i]
        for i, j, k in pairs:
            second[i, j] = second[j, i] = 0.5 * (d2[k] - d2[i] - d2[j])
        return first, second

    def metric(self, y, source_only: bool = False):
        first, _ = self.partials(y)
        if source_only:
            n = self.f.source_dim + 1
            first = first[:, :n]
        return first @ first.T

    def christoffel(self, y, source_only: bool = False):
        """Gamma[k, i, j] with nabla_i d_j = Gamma[k, i, j] d_k, via Koszul on FD metric derivatives."""
        y = np.asarray(y, dtype=float)
        g = self.metric(y, source_only)
        dg = _richardson(lambda z: self.metric(z, source_only), y, self.step)  # dg[m, i, j] = d_m g_ij
        # gamma1[k, i, j] = (d_i g_jk + d_j g_ik - d_k g_ij) / 2
        gamma1 = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg)
        return np.einsum("kl,lij->kij", np.linalg.inv(g), gamma1)

    def riemann(self, y):
        """Rm[i, j, k, l] = <R(d_i, d_j) d_l, d_k> with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]."""
        y = np.asarray(y, dtype=float)
        G = self.christoffel(y)
        dG = _richardson(self.christoffel, y, self.step)  # dG[i, m, j, k] = d_i Gamma^m_jk
        R = (
            np.einsum("imjk->mijk", dG)
            - np.einsum("jmik->mijk", dG)
            + np.einsum("njk,min->mijk", G, G)
            - np.einsum("nik,mjn->mijk", G, G)
        )  # R[m, i, j, k] = R^m_{ijk}
        g = self.metric(y)
        return np.einsum("km,mijl->ijkl", g, R)

    # -- extrinsic pieces ------------------------------------------------
    def normal_frame(self, y):
        x = np.asarray(self.chart(np.asarray(y, dtype=float)))
        return singular_decompose(self.f, x).xi

    def second_fundamental(self, y):
        """A[i, j] = normal part of d_i d_j Phi (ambient product vectors)."""
        _, second = self.partials(y)
        xi = self.normal_frame(y)
        return np.einsum("ijv,av,aw->ijw", second, xi, xi)


def ambient_curvature(X, Y, Z, W, split: int):
    """Curvature of S^m x S^n (unit radii) on product vectors split at index ``split``."""

    def part(sl):
        return (X[sl] @ Z[sl]) * (Y[sl] @ W[sl]) - (X[sl] @ W[sl]) * (Y[sl] @ Z[sl])

    return part(slice(0, split)) + part(slice(split, None))


def ambient_curvature_operator(X, Y, Z, split: int):
    """R~(X, Y) Z = <Y, Z> X - <X, Z> Y in each unit factor."""
    out = np.zeros_like(X)
    for sl in (slice(0, split), slice(split, None)):
        out[sl] = (Y[sl] @ Z[sl]) * X[sl] - (X[sl] @ Z[sl]) * Y[sl]
    return out


@dataclass(frozen=True)
class GaussCodazziReport:
    gauss: float
    codazzi: float
    gauss_e1e2: float


def gauss_codazzi_residuals(f: SphereMap, y, rng=None, triples: int = 10) -> GaussCodazziReport:
    """Max Gauss residual over all index quadruples and Codazzi residual on random frame triples."""
    cg = ChartGraph(f)
    y = np.asarray(y, dtype=float)
    split = f.source_dim + 1
    first, _ = cg.partials(y)
    Rm = cg.riemann(y)
    A = cg.second_fundamental(y)
    dim = y.shape[0]

    gauss = np.zeros((dim,) * 4)
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                for l in range(dim):
                    amb = ambient_curvature(first[i], first[j], first[k], first[l], split)
                    quad = A[i, k] @ A[j, l] - A[i, l] @ A[j, k]
                    gauss[i, j, k, l] = Rm[i, j, k, l] - amb - quad

    # orthonormal graph frame in chart components
    x = np.asarray(cg.chart(y))
    data = singular_decompose(f, x)
    coeff = np.linalg.lstsq(first.T, data.e.T, rcond=None)[0].T  # e_a = sum_i coeff[a, i] d_i
    gauss_e = np.einsum("ai,bj,ck,dl,ijkl->abcd", coeff, coeff, coeff, coeff, gauss)

    # Codazzi: (nabla_i A)_jk - (nabla_j A)_ik - (R~(d_i, d_j) d_k)^perp
    G = cg.christoffel(y)
    dA = _richardson(cg.second_fundamental, y, cg.step)  # dA[i, j, k, :] = d_i (A_jk)
    xi = data.xi
    proj = xi.T @ xi
    nablaA = np.einsum("ijkv,wv->ijkw", dA, proj) - np.einsum("mij,mkv->ijkv", G, A) - np.einsum("mik,jmv->ijkv", G, A)
    cod = np.zeros_like(nablaA)
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                rt = ambient_curvature_operator(first[i], first[j], first[k], split)
                cod[i, j, k] = nablaA[i, j, k] - nablaA[j, i, k] - proj @ rt
    cod_e = np.einsum("ai,bj,ck,ijkv->abcv", coeff, coeff, coeff, cod)
    rng = np.random.default_rng(0) if rng is None else rng
    worst = float(np.max(np.linalg.norm(cod_e, axis=-1)))
    for _ in range(triples):
        u = rng.standard_normal((3, dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        val = np.einsum("a,b,c,abcv->v", u[0], u[1], u[2], cod_e)
        worst = max(worst, float(np.linalg.norm(val)))
    return GaussCodazziReport(float(np.max(np.abs(gauss_e))), worst, float(abs(gauss_e[0, 1, 0, 1])))


def connection_difference_residual(f: SphereMap, y) -> float:
    """|(nabla^g - nabla^{g_M})(X, Y) - (I + df^t df)^{-1} df^t B(X, Y)| over the graph frame."""
    cg = ChartGraph(f)
    y = np.asarray(y, dtype=float)
    first, _ = cg.partials(y)
    n = f.source_dim + 1
    dP = first[:, :n]
    dGamma = cg.christoffel(y) - cg.christoffel(y, source_only=True)
    x = np.asarray(cg.chart(y))
    data, hess, _ = analyze(f, x)
    # chart vectors in the alpha frame
    c = dP @ data.alpha.T  # d_i = sum_a c[i, a] alpha_a
    B = np.einsum("ia,jb,abv->ijv", c, c, hess.vectors)
    sigma = data.sigma
    paired = data.alpha[data.kernel_dim:]
    df_adj = (paired.T * data.paired_sigma) @ data.beta
    inv_src = (data.alpha.T * (1.0 / (1.0 + sigma**2))) @ data.alpha
    rhs = np.einsum("uv,vw,ijw->iju", inv_src, df_adj, B)
    lhs = np.einsum("kij,ku->iju", dGamma, dP)
    coeff = np.linalg.lstsq(dP.T, data.alpha.T / np.sqrt(1 + sigma**2), rcond=None)[0].T
    diff = np.einsum("ai,bj,ijv->abv", coeff, coeff, lhs - rhs)
    return float(np.max(np.linalg.norm(diff, axis=-1)))
