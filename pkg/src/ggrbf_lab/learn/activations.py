"""Neural activations: the learnable GGRBF bump and the leaky rectifier."""

import numpy as np

from ..kernels import ggrbf_profile

__all__ = ["alpha_relu", "alpha_relu_grad", "ggrbf_activation", "ggrbf_activation_grads"]


def _check(alpha, beta):
    if np.any(np.asarray(alpha) == 0) or np.any(np.asarray(beta) == 0):
        raise ValueError("alpha and beta must be nonzero")


def ggrbf_activation(x, alpha, beta):
    """``exp(-x**2 / alpha**2) * exp(exp(-x**2 / beta**2) - 1)``.

    Evaluated through the kernel profile with ``sigma = 1/alpha`` and
    ``sigma0 = 1/beta``, so it equals the GGRBF kernel at distance ``|x|``.
    """
    _check(alpha, beta)
    x = np.asarray(x, dtype=float)
    return ggrbf_profile(x * x, (1.0 / np.asarray(alpha, dtype=float)) ** 2,
                         (1.0 / np.asarray(beta, dtype=float)) ** 2)[()]


def ggrbf_activation_grads(x, alpha, beta):
    """Partial derivatives ``(d/dx, d/dalpha, d/dbeta)`` of :func:`ggrbf_activation`."""
    _check(alpha, beta)
    x = np.asarray(x, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    g = ggrbf_activation(x, alpha, beta)
    x2 = x * x
    inner = np.exp(-x2 / beta ** 2)
    dx = g * (-2.0 * x / alpha ** 2 - (2.0 * x / beta ** 2) * inner)
    da = g * (2.0 * x2 / alpha ** 3)
    db = g * (2.0 * x2 / beta ** 3) * inner
    return dx[()], da[()], db[()]


def alpha_relu(x, leak=0.1):
    """``x`` for ``x > 0``, ``leak * x`` otherwise."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x, leak * x)[()]


def alpha_relu_grad(x, leak=0.1):
    """Derivative; the sub-gradient at 0 is taken as ``leak``."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, 1.0, leak)[()]
