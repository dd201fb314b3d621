"""The holomorphic function space generated by the GGRBF weight.

Functions live on ``C^d`` and are square integrable against the product
measure whose one-dimensional density is

    w(z) = exp(-sigma**2 |z|**2) * exp(exp(-sigma0**2 |z|**2) - 1)

scaled by the normalization ``(e sigma**2 / pi)**d``.  Monomials are
orthogonal, so everything here is computed analytically from the radial
moments; quadrature is used only by the oracle helpers at the bottom.

Constants convention
--------------------
The radial moment is ``pi * n! * S(n, s) / (e * sigma**(2n+2))`` with
``s = sigma0**2 / sigma**2``, and the normalization is
``(e sigma**2 / pi)**d``.  ``paper_constants=True`` switches both to the
``2 pi`` pair (moment doubled, normalization halved); every inner product
is unchanged because the two factors cancel, but a raw moment no longer
matches its integral.
"""

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np
from scipy import special

from .kernels import KernelParams
from .special_fn import QuadratureResult, hyper_sum_S, quad_semi_infinite

__all__ = [
    "MonomialSeries",
    "eval_bound_constant",
    "inner_product",
    "kernel_section",
    "lambda_weight",
    "moment",
    "moment_quadrature",
    "norm",
    "normalization_constant",
    "onb_coeff",
    "onb_eval",
    "radial_weight",
    "reproducing_residual",
    "rk_eval",
    "rk_onb_sum",
]

_LOG_SWITCH = 150
_MAX_TERMS = 10_000


def _angular_factor(paper_constants):
    return 2.0 * math.pi if paper_constants else math.pi


def normalization_constant(params: KernelParams, d: int, paper_constants=False):
    """``(e sigma**2 / pi)**d``; ``(e sigma**2 / 2 pi)**d`` with the 2 pi pair."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return (math.e * params.sigma ** 2 / _angular_factor(paper_constants)) ** d


def moment(n, m, params: KernelParams, paper_constants=False):
    """Integral of ``z**n conj(z)**m`` against the one-dimensional weight."""
    if n < 0 or m < 0:
        raise ValueError("moment orders must be nonnegative")
    if n != m:
        return 0.0
    s = hyper_sum_S(n, params.sigma_hat)
    log_mag = math.lgamma(n + 1) - (2 * n + 2) * math.log(params.sigma) - 1.0
    return _angular_factor(paper_constants) * s * math.exp(log_mag)


def _log_lambda1(n, params):
    return (2 * n * math.log(params.sigma) - math.lgamma(n + 1)
            - math.log(hyper_sum_S(n, params.sigma_hat)))


def onb_coeff(n, params: KernelParams):
    """Coefficient ``sqrt(sigma**(2n) / (n! S(n, s)))`` of the basis monomial ``z**n``."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > _LOG_SWITCH:
        return math.exp(0.5 * _log_lambda1(n, params))
    return math.sqrt(params.sigma ** (2 * n) / (math.factorial(n) * hyper_sum_S(n, params.sigma_hat)))


def lambda_weight(n: Sequence[int], params: KernelParams):
    """Kernel weight ``prod_i sigma**(2 n_i) / (n_i! S(n_i, s))``."""
    n = _as_index(n)
    if max(n) > _LOG_SWITCH:
        return math.exp(sum(_log_lambda1(k, params) for k in n))
    out = 1.0
    for k in n:
        out *= params.sigma ** (2 * k) / (math.factorial(k) * hyper_sum_S(k, params.sigma_hat))
    return out


def _as_index(n):
    if isinstance(n, (int, np.integer)):
        n = (int(n),)
    n = tuple(int(k) for k in n)
    if not n or min(n) < 0:
        raise ValueError(f"invalid multi-index {n!r}")
    return n


def _as_point(z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1 or z.size < 1:
        raise ValueError("a point needs at least one complex coordinate")
    return z


def onb_eval(n: Sequence[int], z, params: KernelParams):
    """Value of the tensor basis element ``prod_i e_{n_i}(z_i)``."""
    n = _as_index(n)
    z = _as_point(z)
    if len(n) != z.size:
        raise ValueError(f"dimension mismatch: index {len(n)} vs point {z.size}")
    out = complex(1.0)
    for k, zi in zip(n, z):
        out *= onb_coeff(k, params) * zi ** k
    return out


# --------------------------------------------------------------------------
# Reproducing kernel
# --------------------------------------------------------------------------

def _exp_tail(u, N):
    """Bound on ``sum_{n > N} u**n / n!`` (needs ``N + 2 > u``)."""
    if N + 2 <= u:
        return math.inf
    log_q = (N + 1) * math.log(u) - math.lgamma(N + 2) if u > 0 else -math.inf
    return math.exp(log_q) / (1.0 - u / (N + 2))


def _rk_1d(t, params, rel_tol, max_terms):
    s_hat = params.sigma_hat
    x = params.sigma ** 2 * t
    u = abs(x)
    re, im = [], []
    power = complex(1.0)  # (sigma^2 t)^n / n!
    pr, pi_ = 0.0, 0.0
    for n in range(max_terms):
        if n:
            power *= x / n
        term = power / hyper_sum_S(n, s_hat)
        re.append(term.real)
        im.append(term.imag)
        pr += term.real
        pi_ += term.imag
        # lambda_n <= sigma^(2n)/n! because S >= 1
        if _exp_tail(u, n) <= rel_tol * abs(complex(pr, pi_)):
            return complex(math.fsum(re), math.fsum(im)), n + 1
    raise RuntimeError(f"kernel series did not reach rel_tol={rel_tol} in {max_terms} terms")


def rk_eval(z, w, params: KernelParams, rel_tol=1e-12, max_terms=_MAX_TERMS):
    """Reproducing kernel ``K(z, w) = sum_n lambda_n (z conj(w))**n``.

    The multi-index series factorizes, so this is a product of
    one-dimensional series.  Each is cut once the majorant
    ``sum_{n>N} (sigma**2 |z_i w_i|)**n / n!`` falls below ``rel_tol``
    times the partial sum.

    Rounding error grows like ``eps * exp(sigma**2 |z_i w_i|) / |K|``,
    so far from the real axis at large ``sigma**2 |z w|`` the phases
    cancel and the relative accuracy degrades.
    """
    z = _as_point(z)
    w = _as_point(w)
    if z.size != w.size:
        raise ValueError(f"dimension mismatch: {z.size} vs {w.size}")
    out = complex(1.0)
    for zi, wi in zip(z, w):
        out *= _rk_1d(zi * np.conj(wi), params, rel_tol, max_terms)[0]
    return out


def rk_onb_sum(z, w, params: KernelParams, order):
    """Truncated basis expansion ``sum_{n_i <= order} e_n(z) conj(e_n(w))``.

    Returns ``(value, tail_bound)``, where the bound covers every dropped
    multi-index.
    """
    z = _as_point(z)
    w = _as_point(w)
    if z.size != w.size:
        raise ValueError(f"dimension mismatch: {z.size} vs {w.size}")
    value = complex(1.0)
    head_prod = 1.0
    tail = 0.0
    for zi, wi in zip(z, w):
        terms = [onb_coeff(n, params) ** 2 * (zi * np.conj(wi)) ** n for n in range(order + 1)]
        value *= complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
        u = params.sigma ** 2 * abs(zi) * abs(wi)
        head = math.fsum(u ** n / math.factorial(n) for n in range(order + 1))
        rest = _exp_tail(u, order)
        # prod(h + t) - prod(h), accumulated without cancellation
        tail = tail * (head + rest) + head_prod * rest
        head_prod *= head
    return value, tail


# --------------------------------------------------------------------------
# Finite monomial series
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialSeries:
    """Finitely supported ``f(z) = sum_n a_n z**n`` on ``C^dimension``."""

    dimension: int
    coefficients: Mapping[tuple, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        clean = {}
        for idx, c in self.coefficients.items():
            idx = _as_index(idx)
            if len(idx) != self.dimension:
                raise ValueError(f"index {idx} does not have length {self.dimension}")
            clean[idx] = complex(c)
        object.__setattr__(self, "coefficients", clean)

    @property
    def degree(self):
        return max((sum(i) for i in self.coefficients), default=0)

    def __call__(self, z):
        z = _as_point(z)
        if z.size != self.dimension:
            raise ValueError(f"dimension mismatch: {z.size} vs {self.dimension}")
        re, im = [], []
        for idx, c in self.coefficients.items():
            v = c * np.prod(z ** np.array(idx))
            re.append(v.real)
            im.append(v.imag)
        return complex(math.fsum(re), math.fsum(im))

    @classmethod
    def basis(cls, n, params: KernelParams):
        """The orthonormal basis element with multi-index ``n`` as a series."""
        n = _as_index(n)
        return cls(len(n), {n: lambda_weight(n, params) ** 0.5})

    @classmethod
    def random(cls, rng, dimension, degree, scale=1.0):
        """Random complex coefficients on all multi-indices of total degree <= ``degree``."""
        idx = [i for i in product(range(degree + 1), repeat=dimension) if sum(i) <= degree]
        coef = scale * (rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx)))
        return cls(dimension, dict(zip(idx, coef)))


def _check_dims(f, g):
    if f.dimension != g.dimension:
        raise ValueError(f"dimension mismatch: {f.dimension} vs {g.dimension}")


def inner_product(f: MonomialSeries, g: MonomialSeries, params: KernelParams, paper_constants=False):
    """Analytic ``<f, g>`` from moment orthogonality (no quadrature)."""
    _check_dims(f, g)
    n1 = normalization_constant(params, 1, paper_constants)
    re, im = [], []
    for idx, a in f.coefficients.items():
        b = g.coefficients.get(idx)
        if b is None:
            continue
        weight = 1.0
        for k in idx:
            weight *= n1 * moment(k, k, params, paper_constants)
        v = a * b.conjugate() * weight
        re.append(v.real)
        im.append(v.imag)
    return complex(math.fsum(re), math.fsum(im))


def norm(f: MonomialSeries, params: KernelParams):
    return math.sqrt(max(inner_product(f, f, params).real, 0.0))


def kernel_section(w, params: KernelParams, support):
    """``K(., w)`` restricted to the multi-indices in ``support``.

    Only those coefficients meet a series supported on ``support`` in an
    inner product, so the restriction is exact for that purpose.
    """
    w = _as_point(w)
    coef = {}
    for idx in support:
        coef[idx] = lambda_weight(idx, params) * np.prod(np.conj(w) ** np.array(idx))
    return MonomialSeries(w.size, coef)


def reproducing_residual(f: MonomialSeries, w, params: KernelParams, paper_constants=False):
    """``|<f, K(., w)> - f(w)|`` with the inner product taken term by term."""
    w = _as_point(w)
    if w.size != f.dimension:
        raise ValueError(f"dimension mismatch: {w.size} vs {f.dimension}")
    k = kernel_section(w, params, f.coefficients.keys())
    return abs(inner_product(f, k, params, paper_constants) - f(w))


# --------------------------------------------------------------------------
# Point-evaluation bound
# --------------------------------------------------------------------------

def radial_weight(r, params: KernelParams):
    """One-dimensional weight ``exp(-sigma**2 r**2) exp(exp(-sigma0**2 r**2) - 1)``."""
    r2 = np.asarray(r, dtype=float) ** 2
    return np.exp(-params.sigma ** 2 * r2) * np.exp(np.expm1(-params.sigma0 ** 2 * r2))


def _radius_range(rect):
    re_lo, re_hi, im_lo, im_hi = map(float, rect)
    if re_lo > re_hi or im_lo > im_hi:
        raise ValueError(f"empty rectangle {rect!r}")
    near = math.hypot(max(re_lo, 0.0, -re_hi), max(im_lo, 0.0, -im_hi))
    far = math.hypot(max(abs(re_lo), abs(re_hi)), max(abs(im_lo), abs(im_hi)))
    return near, far


def eval_bound_constant(box, params: KernelParams, paper_constants=False):
    """Constant ``c`` with ``|f(z)| <= c ||f||`` for every ``z`` in ``box``.

    ``box`` lists one rectangle ``(re_lo, re_hi, im_lo, im_hi)`` per
    coordinate.  The sub-mean-value inequality on the unit polydisc
    around ``z`` gives ``|f(z)|**2 <= ||f||**2 / (inf w * (e sigma**2)**d)``,
    with the infimum of the product weight over the box inflated by the
    unit polydisc; the weight is radially decreasing, so that infimum sits
    at the farthest point.

    ``paper_constants=True`` returns the variant built from the supremum
    of the weight (nearest point), which is not a valid bound in general.
    """
    box = [tuple(r) for r in box]
    if not box:
        raise ValueError("box needs at least one coordinate rectangle")
    d = len(box)
    log_c = -d * math.log(math.e * params.sigma ** 2)
    for rect in box:
        near, far = _radius_range(rect)
        if paper_constants:
            log_c += math.log(float(radial_weight(max(near - 1.0, 0.0), params)))
        else:
            r2 = (far + 1.0) ** 2
            # -log w(r) = sigma^2 r^2 - expm1(-sigma0^2 r^2), kept in log form
            log_c += params.sigma ** 2 * r2 - math.expm1(-params.sigma0 ** 2 * r2)
    return math.exp(0.5 * log_c)


# --------------------------------------------------------------------------
# Quadrature oracles
# --------------------------------------------------------------------------

def moment_quadrature(n, params: KernelParams, rel_tol=1e-10) -> QuadratureResult:
    """Radial quadrature of ``2 pi int_0^inf r**(2n+1) w(r) dr``.

    The angular integral of ``exp(i (n - m) theta)`` is exactly
    ``2 pi delta_nm``, so only the diagonal needs numerics.  The tail
    after ``R`` is bounded by the pure Gaussian moment, an upper
    incomplete gamma function.
    """
    s2 = params.sigma ** 2
    log_pref = math.lgamma(n + 1) - (n + 1) * math.log(s2)

    def f(r):
        return 2.0 * math.pi * r ** (2 * n + 1) * radial_weight(r, params)

    def tail(R):
        return math.pi * math.exp(log_pref) * special.gammaincc(n + 1, s2 * R * R)

    return quad_semi_infinite(f, rel_tol=rel_tol, tail_bound=tail, scale=1.0 / params.sigma)
