"""Binary soft-margin SVM trained by sequential minimal optimization.

Working pairs are chosen by the maximal-violating-pair rule with
second-order selection of the partner (as in LIBSVM).  Training stops once
the duality gap proxy ``m(alpha) - M(alpha)`` is at most ``tol``; every
training point then violates its KKT condition by at most ``tol``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ..kernels import KernelSpec, parse_kernel

__all__ = ["SmoConvergenceWarning", "SvmModel", "kkt_violations", "smo_fit"]

_TAU = 1e-12


class SmoConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SvmModel:
    support: np.ndarray  # training inputs (all of them; alpha == 0 rows kept for KKT audits)
    labels: np.ndarray
    alpha: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float
    iterations: int
    converged: bool

    @property
    def kernel_tag(self):
        return self.kernel.tag

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        sv = self.alpha > 0
        K = self.kernel.matrix(X, self.support[sv])
        return K @ (self.alpha[sv] * self.labels[sv]) + self.bias

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0.0, 1, -1)


def smo_fit(data, kernel, C=1.0, tol=1e-3, max_passes=200):
    """Train on ``data`` with labels in {-1, +1}.

    The iteration budget is ``max_passes * n`` pair updates.  If it runs
    out the model is returned with ``converged=False`` and a
    :class:`SmoConvergenceWarning` is issued.
    """
    if not C > 0:
        raise ValueError("C must be positive")
    spec = parse_kernel(kernel)
    X = data.inputs
    y = np.asarray(data.targets, dtype=float)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present")
    n = len(y)
    K = spec.matrix(X)
    Q = (y[:, None] * y[None, :]) * K
    QD = np.diag(Q).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 0.5 a'Qa - e'a
    budget = max_passes * n
    it = 0
    converged = False
    while it < budget:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        score = -y * G
        i = int(np.argmax(np.where(up, score, -np.inf)))
        m_val = score[i]
        M_val = np.min(np.where(low, score, np.inf))
        if m_val - M_val <= tol:
            converged = True
            break
        # second-order choice of j among violating partners
        b = m_val - score
        cand = low & (b > 0)
        a = QD[i] + QD - 2.0 * y[i] * y * Q[i]
        a = np.where(a > 0, a, _TAU)
        j = int(np.argmin(np.where(cand, -(b * b) / a, np.inf)))
        _update_pair(i, j, alpha, G, Q, y, C)
        it += 1
    if not converged:
        warnings.warn(f"SMO stopped after {it} updates without reaching tol={tol}",
                      SmoConvergenceWarning, stacklevel=2)
    bias = _bias(alpha, G, y, C)
    return SvmModel(X.copy(), y.astype(int), alpha, bias, spec, float(C), it, converged)


def _update_pair(i, j, alpha, G, Q, y, C):
    # move along the feasible direction y_i d_i + y_j d_j = 0
    a = Q[i, i] + Q[j, j] - 2.0 * y[i] * y[j] * Q[i, j]
    if a <= 0:
        a = _TAU
    t = (-y[i] * G[i] + y[j] * G[j]) / a
    # alpha_i += y_i t, alpha_j -= y_j t; clip t so both stay in [0, C]
    lo_i, hi_i = (-alpha[i], C - alpha[i]) if y[i] > 0 else (alpha[i] - C, alpha[i])
    lo_j, hi_j = (alpha[j] - C, alpha[j]) if y[j] > 0 else (-alpha[j], C - alpha[j])
    t = min(max(t, lo_i, lo_j), hi_i, hi_j)
    old_i, old_j = alpha[i], alpha[j]
    new_i = old_i + y[i] * t
    new_j = old_j - y[j] * t
    # snap to the box to keep bounds exact
    new_i = 0.0 if new_i < 1e-15 * C else (C if new_i > C - 1e-15 * C else new_i)
    new_j = 0.0 if new_j < 1e-15 * C else (C if new_j > C - 1e-15 * C else new_j)
    di, dj = new_i - old_i, new_j - old_j
    alpha[i], alpha[j] = new_i, new_j
    G += Q[:, i] * di + Q[:, j] * dj


def _bias(alpha, G, y, C):
    score = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(np.mean(score[free]))
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    hi = np.max(score[up]) if up.any() else np.min(score[low])
    lo = np.min(score[low]) if low.any() else hi
    return float(0.5 * (hi + lo))


def kkt_violations(model):
    """Per-point KKT violation on the training set (0 when satisfied)."""
    f = model.decision_function(model.support)
    margin = model.labels * f - 1.0
    a, C = model.alpha, model.C
    v = np.zeros_like(margin)
    below = a < C
    above = a > 0
    v = np.where(below, np.maximum(v, -margin), v)
    v = np.where(above, np.maximum(v, margin), v)
    return v
