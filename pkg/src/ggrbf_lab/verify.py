"""Self-check bundle for the function-space library.

Every analytic quantity in :mod:`ggrbf_lab.rkhs` is compared against an
independent computation (quadrature, a second summation, or a closed
form) and collected as a list of check entries.
"""

import math

import numpy as np

from .kernels import KernelParams
from .rkhs import (
    MonomialSeries,
    eval_bound_constant,
    inner_product,
    moment,
    moment_quadrature,
    norm,
    normalization_constant,
    onb_coeff,
    reproducing_residual,
    rk_eval,
    rk_onb_sum,
)

__all__ = ["check_entry", "rkhs_verify"]


def _finite(v):
    v = float(v)
    return v if math.isfinite(v) else None


def check_entry(name, computed, reference, tol, kind="rel", **extra):
    """One report row.

    ``kind="rel"`` passes when the relative error is at most ``tol``;
    ``kind="abs"`` compares the absolute error; ``kind="le"`` passes when
    ``computed <= reference * (1 + tol)``.
    """
    computed = float(computed)
    reference = float(reference)
    abs_err = abs(computed - reference)
    rel_err = abs_err / abs(reference) if reference != 0 else abs_err
    if kind == "rel":
        ok = rel_err <= tol
    elif kind == "abs":
        ok = abs_err <= tol
    elif kind == "le":
        ok = computed <= reference * (1.0 + tol)
    else:
        raise ValueError(f"unknown comparison {kind!r}")
    entry = {"check": name, "computed": _finite(computed), "reference": _finite(reference),
             "abs_err": _finite(abs_err), "rel_err": _finite(rel_err), "tol": tol,
             "pass": bool(ok and math.isfinite(computed))}
    entry.update(extra)
    return entry


def _moment_checks(params, n_max, paper_constants):
    out = []
    for n in range(n_max + 1):
        q = moment_quadrature(n, params)
        m = moment(n, n, params, paper_constants)
        out.append(check_entry(f"moment_vs_quadrature[n={n}]", m, q.value, 1e-8,
                               ratio=_finite(m / q.value)))
    unit = KernelParams(1.0, 0.0)
    out.append(check_entry("moment_unit_gaussian[n=0,sigma=1,sigma0=0]",
                           moment(0, 0, unit, paper_constants), math.pi, 1e-10))
    return out


def _onb_checks(params, n_max, paper_constants):
    top = min(8, n_max)
    G = np.empty((top + 1, top + 1))
    for n in range(top + 1):
        for m in range(top + 1):
            en = MonomialSeries.basis(n, params)
            em = MonomialSeries.basis(m, params)
            G[n, m] = abs(inner_product(en, em, params, paper_constants))
    out = [check_entry(f"onb_identity[n,m<={top}]", np.max(np.abs(G - np.eye(top + 1))), 0.0,
                       1e-10, kind="abs")]
    # quadrature route: normalization * coeff**2 * radial integral must be 1
    nc = normalization_constant(params, 1)
    for n in range(min(4, n_max) + 1):
        q = moment_quadrature(n, params).value
        out.append(check_entry(f"onb_quadrature[n={n}]", nc * onb_coeff(n, params) ** 2 * q,
                               1.0, 1e-6))
    return out


def _parseval_check(params, n_max, rng, samples=50):
    degree = min(6, n_max)
    worst = 0.0
    for _ in range(samples):
        f = MonomialSeries.random(rng, 1, degree)
        lhs = norm(f, params) ** 2
        rhs = math.fsum(abs(inner_product(f, MonomialSeries.basis(idx, params), params)) ** 2
                        for idx in f.coefficients)
        worst = max(worst, abs(lhs - rhs) / lhs)
    return check_entry(f"parseval[{samples} series, degree<={degree}]", worst, 0.0, 1e-9,
                       kind="abs")


def _reproducing_check(params, n_max, rng, paper_constants, samples=100):
    degree = min(8, n_max)
    worst = 0.0
    for k in range(samples):
        d = 1 + k % 2
        f = MonomialSeries.random(rng, d, degree)
        w = rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d)
        worst = max(worst, reproducing_residual(f, w, params, paper_constants) / (1 + abs(f(w))))
    return check_entry(f"reproducing_residual[{samples} pairs, degree<={degree}, d=1,2]",
                       worst, 0.0, 1e-9, kind="abs")


def _kernel_sum_checks(params, n_max, rng, samples=5):
    worst_excess = 0.0
    worst_bound = 0.0
    for k in range(samples):
        d = 1 + k % 2
        z = rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d)
        w = rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d)
        exact = rk_eval(z, w, params)
        partial, bound = rk_onb_sum(z, w, params, n_max)
        gap = abs(exact - partial)
        worst_excess = max(worst_excess, gap - bound - 1e-12 * abs(exact))
        worst_bound = max(worst_bound, bound)
    return check_entry(f"kernel_vs_basis_sum[order={n_max}]", worst_excess, 0.0, 0.0, kind="le",
                       tail_bound=_finite(worst_bound))


def _gaussian_reduction_check(params, rng, samples=20):
    gp = KernelParams(params.sigma, 0.0)
    # keep sigma^2 |z w| <= 2, where the power series is well conditioned
    radius = math.sqrt(2.0) / gp.sigma
    worst = 0.0
    for _ in range(samples):
        z = radius * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        w = radius * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        ref = np.exp(gp.sigma ** 2 * z * np.conj(w)) / math.e
        worst = max(worst, abs(rk_eval(z, w, gp) - ref) / abs(ref))
    return check_entry(f"gaussian_reduction[sigma={params.sigma!r}, sigma0=0]", worst, 0.0,
                       1e-12, kind="abs")


def _eval_bound_checks(params, n_max, rng, paper_constants, samples=100):
    degree = min(6, n_max)
    out = []
    boxes = {
        "origin": [(-0.5, 0.5, -0.5, 0.5)],
        "offset": [(1.0, 2.0, -0.5, 0.5)],
        "origin_2d": [(-0.5, 0.5, -0.5, 0.5), (-0.25, 0.25, 0.0, 0.5)],
    }
    for label, box in boxes.items():
        c = eval_bound_constant(box, params, paper_constants)
        d = len(box)
        worst = 0.0
        for k in range(samples):
            # include the basis elements, which come closest to the bound
            if k <= degree:
                f = MonomialSeries.basis((k,) + (0,) * (d - 1), params)
            else:
                f = MonomialSeries.random(rng, d, degree)
            z = np.array([complex(rng.uniform(r[0], r[1]), rng.uniform(r[2], r[3])) for r in box])
            worst = max(worst, abs(f(z)) / (c * norm(f, params)))
        out.append(check_entry(f"eval_bound[{label}]", worst, 1.0, 0.0, kind="le",
                               constant=_finite(c)))
    return out


def _conventions(params, paper_constants):
    s, s0 = params.sigma, params.sigma0
    info = {
        "sigma_hat_used": s0 ** 2 / s ** 2,
        "sigma_hat_alternative": _finite(s ** 2 / s0 ** 2) if s0 > 0 else None,
        "moment_prefactor_used": "2pi" if paper_constants else "pi",
        "moment0_pi_pair": moment(0, 0, params, False),
        "moment0_2pi_pair": moment(0, 0, params, True),
        "normalization_pi_pair": normalization_constant(params, 1, False),
        "normalization_2pi_pair": normalization_constant(params, 1, True),
        "moment0_quadrature": moment_quadrature(0, params).value,
    }
    info["moment_ratio_2pi_over_pi"] = info["moment0_2pi_pair"] / info["moment0_pi_pair"]
    return info


def rkhs_verify(sigma=1.0, sigma0=1.0, n_max=10, seed=0, paper_constants=False):
    """Run every check; returns ``(report, all_passed)``."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    params = KernelParams(sigma, sigma0)
    rng = np.random.default_rng(seed)
    checks = []
    checks += _moment_checks(params, n_max, paper_constants)
    checks += _onb_checks(params, n_max, paper_constants)
    checks.append(_parseval_check(params, n_max, rng))
    checks.append(_reproducing_check(params, n_max, rng, paper_constants))
    checks.append(_kernel_sum_checks(params, n_max, rng))
    checks.append(_gaussian_reduction_check(params, rng))
    checks += _eval_bound_checks(params, n_max, rng, paper_constants)
    passed = all(c["pass"] for c in checks)
    report = {
        "experiment": "rkhs_verify",
        "params": {"sigma": sigma, "sigma0": sigma0, "n_max": n_max},
        "constants": _conventions(params, paper_constants),
        "checks": checks,
        "all_passed": passed,
    }
    return report, passed
