"""Coefficient series, rising factorials and the quadrature oracles.

The central object is the series

    S(n, s) = sum_{l >= 0} 1 / (l! * (1 + l*s)**(n + 1))

which fixes every norm, basis coefficient and kernel weight of the GGRBF
function space.  It lies in [1, e] and equals e exactly when ``s == 0``.

The quadrature routines are deliberately independent of the closed forms:
they are adaptive Gauss-Kronrod (7/15) integrators used only to certify
those closed forms in tests and in ``rkhs-verify``.
"""

import math
import threading
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_TAIL_TOL",
    "HyperSum",
    "QuadratureError",
    "QuadratureResult",
    "hyper_f_nx1",
    "hyper_sum_S",
    "pochhammer",
    "quad_interval",
    "quad_real_line",
    "quad_semi_infinite",
]

DEFAULT_TAIL_TOL = 1e-14
_MAX_TERMS = 10_000


def pochhammer(a, k):
    """Rising factorial ``a (a+1) ... (a+k-1)``; 1 for ``k == 0``."""
    k = int(k)
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def _log_term(l, n, sigma_hat):
    return -math.lgamma(l + 1) - (n + 1) * math.log1p(l * sigma_hat)


@dataclass
class HyperSum:
    """Memoized evaluator of ``S(n, sigma_hat)`` for one fixed ratio.

    Values are summed with :func:`math.fsum` (exactly rounded), and the
    series is cut once the next term drops below ``tail_tol`` times the
    running partial sum.  Terms are decreasing with ratio at most
    ``1/(l+1)``, so the neglected remainder is below ``e * tail_tol``
    relative.
    """

    sigma_hat: float
    tail_tol: float = DEFAULT_TAIL_TOL
    cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        self.sigma_hat = float(self.sigma_hat)
        if not self.sigma_hat >= 0.0 or math.isinf(self.sigma_hat):
            raise ValueError(f"sigma_hat must be finite and >= 0, got {self.sigma_hat}")

    def _compute(self, n):
        terms = [1.0]
        partial = 1.0
        for l in range(1, _MAX_TERMS):
            t = math.exp(_log_term(l, n, self.sigma_hat))
            if t < self.tail_tol * partial:
                break
            terms.append(t)
            partial += t
        return math.fsum(terms)

    def __call__(self, n):
        n = int(n)
        if n < 0:
            raise ValueError("order n must be nonnegative")
        try:
            return self.cache[n]
        except KeyError:
            pass
        with self._lock:
            if n not in self.cache:
                self.cache[n] = self._compute(n)
            return self.cache[n]


_registry = {}
_registry_lock = threading.Lock()


def _hyper_sum_for(sigma_hat, tail_tol=DEFAULT_TAIL_TOL):
    key = (float(sigma_hat), float(tail_tol))
    hs = _registry.get(key)
    if hs is None:
        with _registry_lock:
            hs = _registry.setdefault(key, HyperSum(key[0], key[1]))
    return hs


def hyper_sum_S(n, sigma_hat, tail_tol=DEFAULT_TAIL_TOL):
    """Return ``S(n, sigma_hat) = sum_l 1/(l! (1 + l*sigma_hat)**(n+1))``.

    Shared, thread-safe cache per ``(sigma_hat, tail_tol)``.

    >>> round(hyper_sum_S(0, 1.0), 12) == round(math.e - 1, 12)
    True
    """
    if sigma_hat < 0:
        raise ValueError("sigma_hat must be >= 0")
    return _hyper_sum_for(sigma_hat, tail_tol)(n)


def hyper_f_nx1(n, x, tail_tol=DEFAULT_TAIL_TOL):
    """Normalized unit-argument hypergeometric value ``x**(n+1) sum 1/((l+x)**(n+1) l!)``.

    This is ``pFq([x]*(n+1); [x+1]*(n+1); 1)``; it tends to ``e`` as
    ``x -> inf`` and equals ``S(n, 1/x)``.  Summed here in the
    ``(x/(l+x))**(n+1)`` form, independently of :func:`hyper_sum_S`.
    """
    n = int(n)
    if n < 0:
        raise ValueError("order n must be nonnegative")
    if not x > 0:
        raise ValueError(f"x must be positive, got {x}")
    terms = [1.0]
    partial = 1.0
    for l in range(1, _MAX_TERMS):
        t = math.exp((n + 1) * math.log(x / (l + x)) - math.lgamma(l + 1))
        if t < tail_tol * partial:
            break
        terms.append(t)
        partial += t
    return math.fsum(terms)


# --------------------------------------------------------------------------
# Quadrature
# --------------------------------------------------------------------------

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae (1, 3, 5, 7).
for _k, _w in zip((1, 3, 5), _WG[:3]):
    _GWEIGHTS[_k] = _w
    _GWEIGHTS[14 - _k] = _w
_GWEIGHTS[7] = _WG[3]


class QuadratureError(RuntimeError):
    """Raised when the evaluation budget runs out before the tolerance is met."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES), dtype=float)
    if fx.shape != _NODES.shape:
        fx = np.broadcast_to(fx, _NODES.shape)
    k = h * float(np.dot(_KWEIGHTS, fx))
    g = h * float(np.dot(_GWEIGHTS, fx))
    return k, abs(k - g)


class _Counter:
    def __init__(self, f, budget):
        self.f = f
        self.budget = budget
        self.count = 0

    def __call__(self, x):
        self.count += x.size
        if self.count > self.budget:
            raise QuadratureError(f"evaluation budget of {self.budget} exhausted")
        return self.f(x)


def _vectorize(f):
    def g(x):
        try:
            y = f(x)
            y = np.asarray(y, dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(float(t))) for t in x])
    return g


def _adaptive(fc, a, b, abs_tol, rel_tol, max_depth=60):
    """Globally adaptive bisection on [a, b]; returns (value, error)."""
    value, err = _gk15(fc, a, b)
    panels = [(err, a, b, value)]
    total_v, total_e = value, err
    while total_e > max(abs_tol, rel_tol * abs(total_v)):
        # bisect the panel with the largest error estimate
        idx = max(range(len(panels)), key=lambda i: panels[i][0])
        e0, lo, hi, v0 = panels.pop(idx)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or len(panels) > 2 ** 16:
            panels.append((e0, lo, hi, v0))
            break
        v1, e1 = _gk15(fc, lo, mid)
        v2, e2 = _gk15(fc, mid, hi)
        panels.append((e1, lo, mid, v1))
        panels.append((e2, mid, hi, v2))
        total_v = math.fsum(p[3] for p in panels)
        total_e = math.fsum(p[0] for p in panels)
    return total_v, total_e


def quad_interval(f, a, b, rel_tol=1e-10, abs_tol=1e-300, max_evaluations=1_000_000):
    """Adaptive Gauss-Kronrod integral of ``f`` over the finite interval [a, b]."""
    fc = _Counter(_vectorize(f), max_evaluations)
    v, e = _adaptive(fc, float(a), float(b), abs_tol, rel_tol)
    if e > max(abs_tol, rel_tol * abs(v)) * 10:
        raise QuadratureError(f"tolerance not met on [{a}, {b}]: err={e:.3e}, value={v:.3e}")
    return QuadratureResult(v, e, fc.count)


def quad_semi_infinite(f, rel_tol=1e-10, abs_tol=1e-300, max_evaluations=1_000_000,
                       tail_bound=None, scale=1.0):
    """Integrate ``f`` over [0, inf).

    The half line is marched in panels of geometrically growing width
    (starting at ``scale``); each panel is integrated adaptively to
    ``rel_tol``.  Marching stops when two consecutive panels contribute
    less than ``rel_tol`` times the accumulated value, or, if
    ``tail_bound`` is given, as soon as ``tail_bound(R)`` (a bound on
    ``int_R^inf |f|``) drops below that threshold.  The tail estimate is
    folded into ``abs_error_estimate``.

    Integrands must decay at least like a Gaussian for the panel-based
    stopping rule to be trustworthy.
    """
    fc = _Counter(_vectorize(f), max_evaluations)
    width = float(scale)
    lo = 0.0
    parts, errs = [], []
    quiet = 0
    tail_err = 0.0
    for _ in range(10_000):
        hi = lo + width
        v, e = _adaptive(fc, lo, hi, abs_tol, rel_tol)
        parts.append(v)
        errs.append(e)
        acc = abs(math.fsum(parts))
        thresh = max(rel_tol * acc, abs_tol)
        if tail_bound is not None:
            tb = float(tail_bound(hi))
            if tb <= thresh:
                tail_err = tb
                break
        elif abs(v) <= thresh and abs(float(fc(np.array([hi]))[0])) * width <= thresh:
            quiet += 1
            if quiet >= 2:
                tail_err = abs(v)
                break
        else:
            quiet = 0
        lo = hi
        width *= 1.25
    else:
        raise QuadratureError("half-line integral did not settle")
    value = math.fsum(parts)
    err = math.fsum(errs) + tail_err
    # every panel was allowed abs_tol on its own
    if err > max(abs_tol * len(parts), rel_tol * abs(value)) * 10:
        raise QuadratureError(f"tolerance not met: err={err:.3e}, value={value:.3e}")
    return QuadratureResult(value, err, fc.count)


def quad_real_line(f, rel_tol=1e-10, abs_tol=1e-300, max_evaluations=1_000_000, scale=1.0):
    """Integrate ``f`` over the real line as two half-line integrals.

    Tolerance is judged on each half separately, so odd integrands (true
    value 0) still converge; the result is then accurate in absolute
    terms relative to the size of either half.
    """
    fv = _vectorize(f)
    right = quad_semi_infinite(fv, rel_tol, abs_tol, max_evaluations, scale=scale)
    left = quad_semi_infinite(lambda x: fv(-x), rel_tol, abs_tol,
                              max_evaluations - right.evaluations, scale=scale)
    return QuadratureResult(
        right.value + left.value,
        right.abs_error_estimate + left.abs_error_estimate,
        right.evaluations + left.evaluations,
    )
