"""Hermite polynomials, the Hermite-like GGRBF family, and Mercer expansions.

The Hermite-like functions are

    H_n(x) = (-1)**n / w(x) * d^n/dx^n w(x),
    w(x)   = exp(-a x**2) * exp(exp(-b x**2) - 1),

which reduce to the physicists' Hermite polynomials for ``a = 1, b = 0``.
They are generated exactly by ``H_{n+1} = phi * H_n - H_n'`` with
``phi = -w'/w = 2 a x + 2 b x exp(-b x**2)``, working in the ring of
expressions ``sum c[i, j] x**i exp(-j b x**2)`` (:class:`ExpPoly`).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable

import mpmath
import numpy as np

from .special_fn import quad_real_line

__all__ = [
    "ExpPoly",
    "MercerEigenpair",
    "expoly_diff",
    "gauss_hermite_grid",
    "gg_hermite",
    "gg_hermite_eval",
    "gg_weight",
    "hermite",
    "hermite_coefficients",
    "mercer_gaussian_pair",
    "mercer_reconstruct",
    "nystrom_eig",
    "orthonormality_gram",
    "rodrigues_fd",
]


def hermite(i, x):
    """Physicists' Hermite polynomial by three-term recurrence."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if i == 0:
        return h_prev[()]
    h = 2.0 * x
    for k in range(1, i):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h[()]


def hermite_coefficients(n):
    """Integer coefficients of ``H_n`` in increasing powers of ``x``."""
    prev, cur = [1], [0, 2]
    if n == 0:
        return prev
    for k in range(1, n):
        nxt = [0] * (k + 2)
        for p, c in enumerate(cur):
            nxt[p + 1] += 2 * c
        for p, c in enumerate(prev):
            nxt[p] -= 2 * k * c
        prev, cur = cur, nxt
    return cur


# --------------------------------------------------------------------------
# Exact ring  sum c[i, j] x^i exp(-j b x^2)
# --------------------------------------------------------------------------

def _coerce(v):
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return Fraction(v)
    return float(v)


class ExpPoly:
    """Immutable element ``sum c[i, j] * x**i * exp(-j * b * x**2)``.

    Coefficients stay :class:`~fractions.Fraction` when every input is an
    int or Fraction, so identities can be compared exactly.  With
    ``b == 0`` the exponential factors are 1 and all ``j`` collapse to 0.
    """

    __slots__ = ("_b", "_coef")

    def __init__(self, b, coefficients=None):
        b = _coerce(b)
        if b < 0:
            raise ValueError("b must be nonnegative")
        coef = {}
        for (i, j), c in (coefficients or {}).items():
            if i < 0 or j < 0:
                raise ValueError("powers must be nonnegative")
            key = (int(i), 0 if b == 0 else int(j))
            coef[key] = coef.get(key, 0) + _coerce(c)
        self._b = b
        self._coef = MappingProxyType({k: v for k, v in sorted(coef.items()) if v != 0})

    @property
    def b(self):
        return self._b

    @property
    def coefficients(self):
        return self._coef

    @classmethod
    def constant(cls, b, c=1):
        return cls(b, {(0, 0): c})

    def _same_ring(self, other):
        if isinstance(other, ExpPoly):
            if other.b != self.b:
                raise ValueError("ExpPoly operands have different b")
            return other
        return ExpPoly.constant(self.b, other)

    def __add__(self, other):
        other = self._same_ring(other)
        out = dict(self._coef)
        for k, v in other._coef.items():
            out[k] = out.get(k, 0) + v
        return ExpPoly(self.b, out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly(self.b, {k: -v for k, v in self._coef.items()})

    def __sub__(self, other):
        return self + (-self._same_ring(other))

    def __rsub__(self, other):
        return self._same_ring(other) - self

    def __mul__(self, other):
        other = self._same_ring(other)
        out = {}
        for (i1, j1), c1 in self._coef.items():
            for (i2, j2), c2 in other._coef.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return ExpPoly(self.b, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ExpPoly.constant(self.b, 1)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self.b == other.b and dict(self._coef) == dict(other._coef)

    def __hash__(self):
        return hash((self.b, tuple(self._coef.items())))

    def __repr__(self):
        body = " + ".join(f"{c}*x^{i}*E^{j}" for (i, j), c in self._coef.items()) or "0"
        return f"ExpPoly(b={self.b}: {body})"

    def diff(self):
        return expoly_diff(self)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        e = np.exp(-float(self.b) * x * x)
        for (i, j), c in self._coef.items():
            out = out + float(c) * x ** i * e ** j
        return out[()]


def expoly_diff(p: ExpPoly) -> ExpPoly:
    """Exact derivative: ``x^i E^j -> i x^(i-1) E^j - 2 j b x^(i+1) E^j``."""
    out = {}
    for (i, j), c in p.coefficients.items():
        if i:
            out[(i - 1, j)] = out.get((i - 1, j), 0) + i * c
        if j:
            out[(i + 1, j)] = out.get((i + 1, j), 0) - 2 * j * p.b * c
    return ExpPoly(p.b, out)


def gg_hermite(n, a, b) -> ExpPoly:
    """Hermite-like function ``H_n`` for the weight with constants ``(a, b)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    a, b = _coerce(a), _coerce(b)
    if not a > 0:
        raise ValueError("a must be positive")
    phi = ExpPoly(b, {(1, 0): 2 * a, (1, 1): 2 * b})
    h = ExpPoly.constant(b, 1)
    for _ in range(n):
        h = phi * h - h.diff()
    return h


def gg_hermite_eval(n, a, b, x):
    return gg_hermite(n, a, b)(x)


def gg_weight(x, a, b):
    """``exp(-a x**2) * exp(exp(-b x**2) - 1)``."""
    x2 = np.asarray(x, dtype=float) ** 2
    return np.exp(-float(a) * x2) * np.exp(np.expm1(-float(b) * x2))


def _mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def rodrigues_fd(n, a, b, x, h=1e-8, dps=60):
    """``(-1)**n w(x)**-1 d^n w/dx^n`` by a central difference at extended precision.

    Independent of the recurrence; used as its oracle.
    """
    with mpmath.workdps(dps):
        a_, b_, x_, h_ = _mpf(a), _mpf(b), _mpf(x), _mpf(h)

        def w(t):
            return mpmath.exp(-a_ * t * t) * mpmath.exp(mpmath.exp(-b_ * t * t) - 1)

        acc = mpmath.mpf(0)
        for k in range(n + 1):
            acc += (-1) ** k * mpmath.binomial(n, k) * w(x_ + (mpmath.mpf(n) / 2 - k) * h_)
        return float((-1) ** n * acc / h_ ** n / w(x_))


# --------------------------------------------------------------------------
# Mercer expansions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MercerEigenpair:
    index: int
    eigenvalue: float
    eigenfunction: Callable


def mercer_gaussian_pair(i, alpha, sigma, form="variant"):
    """Closed-form eigenpair of ``exp(-sigma**2 (x - z)**2)`` under a Gaussian weight.

    ``form="standard"`` is the textbook expansion, orthonormal under
    ``alpha/sqrt(pi) exp(-alpha**2 x**2)``.  ``form="variant"`` swaps in a
    ``(1 + (1 + 2 sigma/alpha)**2)**(1/8)`` prefactor and a ``sigma**2 / 2``
    term in the eigenvalue denominator; it is kept only to measure how far
    that form is from the true eigenpairs.
    """
    if not (alpha > 0 and sigma > 0):
        raise ValueError("alpha and sigma must be positive")
    beta2 = math.sqrt(1.0 + (2.0 * sigma / alpha) ** 2)
    shift = (beta2 - 1.0) * alpha ** 2 / 2.0
    norm = math.sqrt(2.0 ** i * math.factorial(i))
    if form == "variant":
        denom = alpha ** 2 / 2.0 * (1.0 + beta2) + sigma ** 2 / 2.0
        pref = (1.0 + (1.0 + 2.0 * sigma / alpha) ** 2) ** 0.125 / norm
    elif form == "standard":
        denom = alpha ** 2 / 2.0 * (1.0 + beta2) + sigma ** 2
        pref = beta2 ** 0.25 / norm
    else:
        raise ValueError(f"unknown form {form!r}")
    lam = alpha * sigma ** (2 * i) / denom ** (i + 0.5)
    scale = math.sqrt(beta2) * alpha

    def phi(x):
        x = np.asarray(x, dtype=float)
        return pref * np.exp(-shift * x * x) * hermite(i, scale * x)

    return MercerEigenpair(i, lam, phi)


def gauss_hermite_grid(n, alpha=1.0):
    """Nodes and weights integrating against ``alpha/sqrt(pi) exp(-alpha**2 x**2)``."""
    t, w = np.polynomial.hermite.hermgauss(n)
    return t / alpha, w / math.sqrt(math.pi)


def nystrom_eig(kernel, nodes, weights, count):
    """Top ``count`` eigenpairs of the integral operator of ``kernel``.

    ``kernel(x, z)`` must broadcast over arrays.  The operator is
    discretized as ``W**0.5 K W**0.5`` on the weighted grid and the
    eigenfunctions are extended off-grid by the Nystrom formula
    ``phi(x) = sum_j w_j k(x, x_j) phi(x_j) / Lambda``.  Eigenfunctions
    are normalized in the discrete weighted L2 norm and signed so their
    largest nodal value is positive.
    """
    x = np.asarray(nodes, dtype=float)
    w = np.asarray(weights, dtype=float)
    sw = np.sqrt(w)
    K = kernel(x[:, None], x[None, :])
    A = sw[:, None] * K * sw[None, :]
    A = 0.5 * (A + A.T)
    vals, vecs = np.linalg.eigh(A)
    order = np.argsort(vals)[::-1][:count]
    pairs = []
    for rank, k in enumerate(order):
        lam = float(vals[k])
        nodal = vecs[:, k] / sw
        if nodal[np.argmax(np.abs(nodal))] < 0:
            nodal = -nodal
        coef = w * nodal / lam if lam > 0 else np.zeros_like(w)

        def phi(t, coef=coef):
            t = np.asarray(t, dtype=float)
            return (kernel(t[..., None], x) @ coef)[()]

        pairs.append(MercerEigenpair(rank, lam, phi))
    return pairs


def mercer_reconstruct(x, z, pairs, count=None):
    """Truncated Mercer sum ``sum_{i < count} Lambda_i phi_i(x) phi_i(z)``."""
    count = len(pairs) if count is None else count
    if count > len(pairs):
        raise ValueError("not enough eigenpairs")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    out = np.zeros(np.broadcast(x, z).shape)
    for p in pairs[:count]:
        out = out + p.eigenvalue * p.eigenfunction(x) * p.eigenfunction(z)
    return out[()]


def orthonormality_gram(family, weight, max_index, rel_tol=1e-10, abs_tol=1e-12, scale=1.0):
    """Table of ``int f_n f_m weight dx`` for ``n, m <= max_index``.

    ``family(n)`` returns a vectorized callable; ``weight`` is a
    vectorized density.  Each entry is a real-line quadrature.  Diagonal
    entries are computed first; off-diagonal entries, which may vanish,
    are then resolved to ``abs_tol * sqrt(G[n, n] G[m, m])``.
    """
    funcs = [family(n) for n in range(max_index + 1)]
    G = np.empty((max_index + 1, max_index + 1))

    def entry(n, m, tol):
        def f(t, fn=funcs[n], fm=funcs[m]):
            return fn(t) * fm(t) * weight(t)
        return quad_real_line(f, rel_tol=rel_tol, abs_tol=tol, scale=scale).value

    for n in range(max_index + 1):
        G[n, n] = entry(n, n, 1e-300)
    for n in range(max_index + 1):
        for m in range(n + 1, max_index + 1):
            G[n, m] = G[m, n] = entry(n, m, abs_tol * math.sqrt(abs(G[n, n] * G[m, m])))
    return G
