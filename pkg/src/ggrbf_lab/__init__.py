"""Generalized Gaussian RBF kernels and the function space they generate."""

from .kernels import KernelParams, ggrbf, gram, grbf, min_eigenvalue, parse_kernel, sigmoid_kernel
from .special_fn import hyper_f_nx1, hyper_sum_S, pochhammer, quad_real_line, quad_semi_infinite

__all__ = [
    "KernelParams",
    "ggrbf",
    "gram",
    "grbf",
    "hyper_f_nx1",
    "hyper_sum_S",
    "min_eigenvalue",
    "parse_kernel",
    "pochhammer",
    "quad_real_line",
    "quad_semi_infinite",
    "sigmoid_kernel",
]
__version__ = "0.1.0"
