"""Real-domain kernels, Gram assembly and PSD diagnostics.

Three kernels are provided:

* GRBF    ``exp(-sigma**2 * |x - z|**2)``
* GGRBF   ``exp(-sigma**2 * r2) * exp(exp(-sigma0**2 * r2) - 1)``
* sigmoid ``tanh(gamma * <x, z> + coef0)``

GGRBF with ``sigma0 == 0`` goes through the same expression as GRBF
multiplied by ``exp(expm1(-0.0)) == 1.0``, so the two agree bit for bit.

Kernel selectors are strings such as ``"ggrbf:sigma=1,sigma0=0.5"``; see
:func:`parse_kernel`.
"""

import math
from dataclasses import dataclass
import numpy as np

__all__ = [
    "GramMatrix",
    "KernelParams",
    "KernelSpec",
    "KernelSelectorError",
    "ggrbf",
    "ggrbf_profile",
    "gram",
    "grbf",
    "min_eigenvalue",
    "parse_kernel",
    "sigmoid_kernel",
]


@dataclass(frozen=True)
class KernelParams:
    """Inverse length scales ``sigma > 0`` and ``sigma0 >= 0``."""

    sigma: float
    sigma0: float = 0.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        if not (self.sigma0 >= 0 and math.isfinite(self.sigma0)):
            raise ValueError(f"sigma0 must be nonnegative and finite, got {self.sigma0}")

    @property
    def sigma_hat(self):
        """Ratio ``sigma0**2 / sigma**2``."""
        return self.sigma0 ** 2 / self.sigma ** 2


def _check_pair(x, z):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if x.shape[-1] != z.shape[-1]:
        raise ValueError(f"dimension mismatch: {x.shape[-1]} vs {z.shape[-1]}")
    return x, z


def _sqdist(x, z):
    d = x - z
    return np.sum(d * d, axis=-1)


def ggrbf_profile(r2, s2, s02):
    """Radial profile ``exp(-s2*r2) * exp(exp(-s02*r2) - 1)`` of squared distance.

    Shared by the kernels and by the neural activation, which is this
    profile evaluated at ``r2 = x*x``.
    """
    r2 = np.asarray(r2, dtype=float)
    return np.exp(-s2 * r2) * np.exp(np.expm1(-s02 * r2))


def grbf(x, z, sigma):
    """Gaussian RBF kernel ``exp(-sigma**2 * |x - z|**2)``."""
    x, z = _check_pair(x, z)
    return ggrbf_profile(_sqdist(x, z), sigma ** 2, 0.0)[()]


def ggrbf(x, z, params):
    """Generalized Gaussian RBF kernel value(s)."""
    x, z = _check_pair(x, z)
    return ggrbf_profile(_sqdist(x, z), params.sigma ** 2, params.sigma0 ** 2)[()]


def sigmoid_kernel(x, z, gamma=None, coef0=0.0):
    """Sigmoid kernel ``tanh(gamma * <x, z> + coef0)``; ``gamma`` defaults to ``1/d``.

    Not positive semidefinite in general.
    """
    x, z = _check_pair(x, z)
    if gamma is None:
        gamma = 1.0 / x.shape[-1]
    return np.tanh(gamma * np.sum(x * z, axis=-1) + coef0)[()]


# --------------------------------------------------------------------------
# Kernel selectors
# --------------------------------------------------------------------------

class KernelSelectorError(ValueError):
    pass


_FIELDS = {
    "grbf": ("sigma",),
    "ggrbf": ("sigma", "sigma0"),
    "sigmoid": ("gamma", "coef0"),
}
_OPTIONAL = {"sigmoid": {"gamma": None, "coef0": 0.0}, "ggrbf": {}, "grbf": {}}


@dataclass(frozen=True)
class KernelSpec:
    """A parsed kernel selector: family name plus numeric parameters."""

    family: str
    params: tuple  # (name, value) pairs in selector field order

    @property
    def kw(self):
        return dict(self.params)

    @property
    def tag(self):
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params if v is not None)
        return f"{self.family}:{body}" if body else self.family

    def kernel_params(self):
        kw = self.kw
        if self.family == "grbf":
            return KernelParams(kw["sigma"], 0.0)
        if self.family == "ggrbf":
            return KernelParams(kw["sigma"], kw["sigma0"])
        raise ValueError("sigmoid kernel has no (sigma, sigma0) parameters")

    def matrix(self, X, Z=None):
        """Kernel matrix between the rows of ``X`` and ``Z`` (``Z = X`` if omitted)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = X if Z is None else np.atleast_2d(np.asarray(Z, dtype=float))
        if X.shape[1] != Z.shape[1]:
            raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
        kw = self.kw
        if self.family == "sigmoid":
            gamma = kw.get("gamma")
            if gamma is None:
                gamma = 1.0 / X.shape[1]
            return np.tanh(gamma * (X @ Z.T) + kw.get("coef0", 0.0))
        r2 = _sqdist(X[:, None, :], Z[None, :, :])
        p = self.kernel_params()
        return ggrbf_profile(r2, p.sigma ** 2, p.sigma0 ** 2)

    def __call__(self, x, z):
        kw = self.kw
        if self.family == "grbf":
            return grbf(x, z, kw["sigma"])
        if self.family == "ggrbf":
            return ggrbf(x, z, self.kernel_params())
        return sigmoid_kernel(x, z, kw.get("gamma"), kw.get("coef0", 0.0))


def _fmt(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def parse_kernel(selector):
    """Parse ``grbf:sigma=<v>``, ``ggrbf:sigma=<v>,sigma0=<v>`` or
    ``sigmoid:gamma=<v>,coef0=<v>`` into a :class:`KernelSpec`.

    Raises :class:`KernelSelectorError` naming the offending field.
    """
    if isinstance(selector, KernelSpec):
        return selector
    family, _, body = str(selector).strip().partition(":")
    family = family.strip().lower()
    if family not in _FIELDS:
        raise KernelSelectorError(f"unknown kernel family {family!r}; expected one of {sorted(_FIELDS)}")
    values = dict(_OPTIONAL[family])
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, eq, val = item.partition("=")
        key = key.strip()
        if not eq or key not in _FIELDS[family]:
            raise KernelSelectorError(f"bad field {item!r} for kernel {family!r}")
        try:
            values[key] = float(val)
        except ValueError:
            raise KernelSelectorError(f"field {key!r} is not a number: {val!r}") from None
        if not math.isfinite(values[key]):
            raise KernelSelectorError(f"field {key!r} must be finite")
    for key in _FIELDS[family]:
        if key not in values:
            raise KernelSelectorError(f"kernel {family!r} requires field {key!r}")
    if family in ("grbf", "ggrbf") and not values["sigma"] > 0:
        raise KernelSelectorError("field 'sigma' must be positive")
    if family == "ggrbf" and not values["sigma0"] >= 0:
        raise KernelSelectorError("field 'sigma0' must be nonnegative")
    return KernelSpec(family, tuple((k, values[k]) for k in _FIELDS[family]))


# --------------------------------------------------------------------------
# Gram matrices
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    kernel_tag: str

    @property
    def size(self):
        return self.entries.shape[0]


def gram(points, kernel):
    """Symmetric table of pairwise kernel values.

    ``kernel`` is a selector string, a :class:`KernelSpec`, or a
    :class:`KernelParams` (taken as GGRBF).  Each unordered pair is
    evaluated once and mirrored, so the table is exactly symmetric.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        raise ValueError("gram() needs at least one point")
    if isinstance(kernel, KernelParams):
        kernel = KernelSpec("ggrbf", (("sigma", kernel.sigma), ("sigma0", kernel.sigma0)))
    spec = parse_kernel(kernel)
    K = spec.matrix(X)
    iu = np.triu_indices(X.shape[0], 1)
    K[(iu[1], iu[0])] = K[iu]
    return GramMatrix(K, spec.tag)


def min_eigenvalue(g):
    """Smallest eigenvalue of a symmetric table (LAPACK ``syevd`` via numpy)."""
    A = g.entries if isinstance(g, GramMatrix) else np.asarray(g, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square table")
    if not np.array_equal(A, A.T):
        raise ValueError("table is not symmetric")
    try:
        return float(np.linalg.eigvalsh(A)[0])
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"symmetric eigen-solver did not converge: {exc}") from exc
