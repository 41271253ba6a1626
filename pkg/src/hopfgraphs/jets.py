"""Truncated Taylor arithmetic in one variable.

A :class:`Jet` carries the coefficients ``c[0], ..., c[K]`` of a truncated
power series ``c[0] + c[1] t + ... + c[K] t**K`` whose coefficients are numpy
arrays of a common shape.  Indexing, arithmetic and the elementary functions
below act on the value shape, so map formulas written with ``x[..., 0]`` style
indexing run unchanged on plain arrays and on jets.  The derivative of order
``n`` at ``t = 0`` is ``n! * c[n]``.
"""

from __future__ import annotations

from collections.abc import Sequence
from math import factorial

import numpy as np


class Jet:
    __array_priority__ = 1000  # make ndarray (op) Jet defer to Jet

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)
        if self.c.ndim == 0:
            raise ValueError("a jet needs at least one coefficient")

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> Jet:
        value = np.asarray(value)
        c = np.zeros((order + 1,) + value.shape, dtype=value.dtype if value.dtype.kind in "fc" else float)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, direction, order: int) -> Jet:
        """The jet of ``value + t * direction``."""
        dtype = np.result_type(np.asarray(value), np.asarray(direction), float)
        j = cls.constant(np.asarray(value, dtype=dtype), order)
        if order >= 1:
            j.c[1] = direction
        return j

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def value(self):
        return self.c[0]

    def derivative(self, n: int):
        """The n-th derivative at t = 0."""
        return factorial(n) * self.c[n]

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape})"

    # array-like plumbing ----------------------------------------------
    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[(slice(None),) + idx])

    def __len__(self):
        return self.shape[0]

    @property
    def real(self):
        return Jet(self.c.real)

    @property
    def imag(self):
        return Jet(self.c.imag)

    def conj(self):
        return Jet(np.conj(self.c))

    def sum(self, axis=-1):
        ax = axis if axis < 0 else axis + 1
        return Jet(self.c.sum(axis=ax))

    def reshape(self, *shape):
        return Jet(self.c.reshape((self.c.shape[0],) + tuple(shape)))

    # arithmetic -------------------------------------------------------
    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = _align(self.c, other.c)
            return Jet(a + b)
        return Jet(_add_const(self.c, other))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(cauchy(self.c, other.c))
        a, b = _align(self.c, _as_coeff(other))
        return Jet(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        a, b = _align(self.c, _as_coeff(other))
        return Jet(a / b)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            if n < 0:
                return reciprocal(self) ** (-n)
            out = Jet.constant(np.ones(self.shape, dtype=self.c.dtype), self.order)
            base = self
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        return exp(log(self) * n)


def _as_coeff(x):
    """View a constant as a one-term coefficient stack that broadcasts."""
    x = np.asarray(x)
    return x.reshape((1,) + x.shape)


def _align(a, b):
    """Pad value dimensions so two coefficient stacks broadcast value-wise."""
    da, db = a.ndim - 1, b.ndim - 1
    if da < db:
        a = a.reshape(a.shape[:1] + (1,) * (db - da) + a.shape[1:])
    elif db < da:
        b = b.reshape(b.shape[:1] + (1,) * (da - db) + b.shape[1:])
    return a, b


def _add_const(c, other):
    other = np.asarray(other)
    shape = np.broadcast_shapes(c.shape[1:], other.shape)
    out = np.zeros((c.shape[0],) + shape, dtype=np.result_type(c, other))
    out[...] = c.reshape((c.shape[0],) + (1,) * (len(shape) - (c.ndim - 1)) + c.shape[1:])
    out[0] = out[0] + other
    return out


def cauchy(a, b):
    """Truncated Cauchy product of two coefficient stacks."""
    K = min(a.shape[0], b.shape[0]) - 1
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros((K + 1,) + shape, dtype=np.result_type(a, b))
    for k in range(K + 1):
        acc = out[k]
        for j in range(k + 1):
            acc = acc + a[j] * b[k - j]
        out[k] = acc
    return out


def bilinear(a, b, table):
    """Apply a bilinear product ``out_k = sum_ij table[i,j,k] a_i b_j`` on the last axis.

    ``a`` and ``b`` may be arrays or jets; used for quaternion and octonion
    multiplication.
    """
    if isinstance(a, Jet) or isinstance(b, Jet):
        order = a.order if isinstance(a, Jet) else b.order
        ac = a.c if isinstance(a, Jet) else Jet.constant(a, order).c
        bc = b.c if isinstance(b, Jet) else Jet.constant(b, order).c
        K = min(ac.shape[0], bc.shape[0]) - 1
        terms = []
        for k in range(K + 1):
            terms.append(sum(np.einsum("...i,...j,ijk->...k", ac[j], bc[k - j], table) for j in range(k + 1)))
        return Jet(np.stack(terms))
    return np.einsum("...i,...j,ijk->...k", a, b, table)


# -------------------------------------------------------------------------
# elementary functions; each accepts a Jet or anything numpy understands


def _is_jet(x):
    return isinstance(x, Jet)


def reciprocal(x: Jet) -> Jet:
    a = x.c
    q = np.zeros_like(a, dtype=np.result_type(a, float))
    q[0] = 1.0 / a[0]
    for k in range(1, a.shape[0]):
        acc = sum(a[j] * q[k - j] for j in range(1, k + 1))
        q[k] = -acc / a[0]
    return Jet(q)


def exp(x):
    if not _is_jet(x):
        return np.exp(x)
    a = x.c
    y = np.zeros_like(a, dtype=np.result_type(a, float))
    y[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        y[k] = sum(j * a[j] * y[k - j] for j in range(1, k + 1)) / k
    return Jet(y)


def log(x):
    if not _is_jet(x):
        return np.log(x)
    a = x.c
    y = np.zeros_like(a, dtype=np.result_type(a, float))
    y[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = k * a[k] - sum(a[j] * (k - j) * y[k - j] for j in range(1, k))
        y[k] = acc / (k * a[0])
    return Jet(y)


def sincos(x):
    if not _is_jet(x):
        return np.sin(x), np.cos(x)
    a = x.c
    s = np.zeros_like(a, dtype=np.result_type(a, float))
    c = np.zeros_like(s)
    s[0], c[0] = np.sin(a[0]), np.cos(a[0])
    for k in range(1, a.shape[0]):
        s[k] = sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = -sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k
    return Jet(s), Jet(c)


def sin(x):
    return sincos(x)[0]


def cos(x):
    return sincos(x)[1]


def tan(x):
    s, c = sincos(x)
    return s / c


def sqrt(x):
    if not _is_jet(x):
        return np.sqrt(x)
    a = x.c
    y = np.zeros_like(a, dtype=np.result_type(a, float))
    y[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        acc = a[k] - sum(y[j] * y[k - j] for j in range(1, k))
        y[k] = acc / (2.0 * y[0])
    return Jet(y)


def _integrate(y0, rate: Jet, order: int) -> Jet:
    """Jet with constant term y0 and derivative ``rate`` (known to order-1)."""
    c = np.zeros((order + 1,) + np.broadcast_shapes(np.shape(y0), rate.shape), dtype=np.result_type(rate.c, float))
    c[0] = y0
    for k in range(1, order + 1):
        c[k] = rate.c[k - 1] / k
    return Jet(c)


def _truncate(x: Jet, order: int) -> Jet:
    return Jet(x.c[: order + 1])


def _dot(x: Jet) -> Jet:
    """d/dt of a jet, one order lower."""
    K = x.order
    if K == 0:
        return Jet(np.zeros_like(x.c))
    return Jet(np.stack([(k + 1) * x.c[k + 1] for k in range(K)]))


def arctan(x):
    if not _is_jet(x):
        return np.arctan(x)
    K = x.order
    if K == 0:
        return Jet(np.arctan(x.c))
    low = _truncate(x, K - 1)
    rate = _dot(x) / (1.0 + low * low)
    return _integrate(np.arctan(x.c[0]), rate, K)


def arctan2(y, x):
    if not (_is_jet(y) or _is_jet(x)):
        return np.arctan2(y, x)
    order = y.order if _is_jet(y) else x.order
    y = y if _is_jet(y) else Jet.constant(y, order)
    x = x if _is_jet(x) else Jet.constant(x, order)
    if order == 0:
        return Jet(np.arctan2(y.c, x.c))
    xl, yl = _truncate(x, order - 1), _truncate(y, order - 1)
    rate = (xl * _dot(y) - yl * _dot(x)) / (xl * xl + yl * yl)
    return _integrate(np.arctan2(y.c[0], x.c[0]), rate, order)


def compose(x, derivatives: Sequence):
    """Evaluate ``g(x)`` given ``derivatives[n] = g^(n)(x0)`` at the base value.

    Plain arrays return ``derivatives[0]``.  For jets the series
    ``sum_n g^(n)(x0)/n! (x - x0)^n`` is truncated at the jet order, which
    needs ``len(derivatives) > x.order``.
    """
    if not _is_jet(x):
        return np.asarray(derivatives[0])
    K = x.order
    if len(derivatives) <= K:
        raise ValueError(f"need {K + 1} derivatives, got {len(derivatives)}")
    delta = Jet(x.c.copy())
    delta.c[0] = 0.0
    out = Jet.constant(np.asarray(derivatives[0], dtype=float) * np.ones(x.shape), K)
    power = Jet.constant(np.ones(x.shape), K)
    for n in range(1, K + 1):
        power = power * delta
        out = out + power * (np.asarray(derivatives[n]) / factorial(n))
    return out


def stack(items, axis=-1):
    """Stack arrays or jets along a new value axis."""
    if any(_is_jet(i) for i in items):
        order = next(i.order for i in items if _is_jet(i))
        cs = [i.c if _is_jet(i) else Jet.constant(i, order).c for i in items]
        shape = np.broadcast_shapes(*(c.shape for c in cs))
        cs = [np.broadcast_to(c, shape) for c in cs]
        ax = axis if axis < 0 else axis + 1
        return Jet(np.stack(cs, axis=ax))
    return np.stack(items, axis=axis)


def dot(a, b):
    """Inner product over the last axis."""
    return (a * b).sum(axis=-1) if _is_jet(a) or _is_jet(b) else np.sum(a * b, axis=-1)


def norm2(a):
    """Squared Euclidean norm over the last axis (complex entries allowed)."""
    if _is_jet(a):
        return (a * a.conj()).real.sum(axis=-1)
    return np.sum(np.abs(a) ** 2, axis=-1)


def abs2(z):
    """|z|^2 for complex arrays or jets, elementwise."""
    if _is_jet(z):
        return (z * z.conj()).real
    return np.abs(z) ** 2


def conj(z):
    return z.conj() if _is_jet(z) else np.conj(z)


def real(z):
    return z.real if _is_jet(z) else np.real(z)


def imag(z):
    return z.imag if _is_jet(z) else np.imag(z)
