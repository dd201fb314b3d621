"""Kernel ridge regression: solve ``(K + lam I) w = y`` by Cholesky."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..kernels import KernelSpec, parse_kernel

__all__ = ["KrrFactorizationError", "KrrModel", "krr_fit", "krr_predict"]


class KrrFactorizationError(np.linalg.LinAlgError):
    """``K + lam I`` is not numerically positive definite, or its solve is inaccurate."""


@dataclass(frozen=True)
class KrrModel:
    centers: np.ndarray
    weights: np.ndarray
    kernel: KernelSpec
    ridge: float
    residual: float

    @property
    def kernel_tag(self):
        return self.kernel.tag

    def predict(self, x):
        return krr_predict(self, x)


def krr_fit(data, kernel, ridge):
    """Fit dual weights on ``data``; ``kernel`` is a selector or :class:`KernelSpec`."""
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    spec = parse_kernel(kernel)
    X = data.inputs
    y = np.asarray(data.targets, dtype=float)
    A = spec.matrix(X)
    A[np.diag_indices_from(A)] += ridge
    c, info = linalg.lapack.dpotrf(A, lower=1, clean=1)
    if info != 0:
        pivot = float(np.diag(c)[info - 1]) if info > 0 else float("nan")
        raise KrrFactorizationError(
            f"Cholesky failed at leading minor {info} (pivot {pivot:.3e}); "
            f"increase the ridge above {ridge:g}")
    w = linalg.cho_solve((c, True), y)
    residual = float(np.linalg.norm(A @ w - y))
    if residual > 1e-8 * max(float(np.linalg.norm(y)), np.finfo(float).tiny):
        raise KrrFactorizationError(
            f"solve residual {residual:.3e} exceeds 1e-8 |y|; increase the ridge above {ridge:g}")
    return KrrModel(X.copy(), w, spec, float(ridge), residual)


def krr_predict(model, x):
    """``sum_i w_i k(x, center_i)`` for one point or a batch of rows."""
    x = np.asarray(x, dtype=float)
    d = model.centers.shape[1]
    if d == 1:
        single = x.ndim == 0
        X = x.reshape(-1, 1)
    else:
        single = x.ndim == 1
        X = np.atleast_2d(x)
    if X.shape[1] != d:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {d}")
    out = model.kernel.matrix(X, model.centers) @ model.weights
    return float(out[0]) if single else out
