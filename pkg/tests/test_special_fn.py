import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ggrbf_lab.special_fn import (
    HyperSum,
    QuadratureError,
    hyper_f_nx1,
    hyper_sum_S,
    pochhammer,
    quad_interval,
    quad_real_line,
    quad_semi_infinite,
)

# mpmath nsum at 40 digits
FROZEN_S = {
    (3, 0.5): 1.2336234187019549498,
    (2, 1.0): 1.1464990725286428079,
    (10, 2.0): 1.0000056553549161332,
    (1, 0.1): 2.2978697225521536711,
}


@pytest.mark.parametrize("a,k,expected", [(3, 0, 1), (2, 3, 24), (0.5, 2, 0.75), (-2, 3, 0)])
def test_pochhammer(a, k, expected):
    assert pochhammer(a, k) == pytest.approx(expected, rel=1e-15)


def test_pochhammer_rejects_negative_k():
    with pytest.raises(ValueError):
        pochhammer(1.0, -1)


def test_sum_at_zero_ratio_is_e():
    for n in (0, 5, 50):
        assert hyper_sum_S(n, 0.0) == pytest.approx(math.e, abs=1e-12)


def test_closed_forms():
    # sum 1/(l!(l+1)) = e - 1 and 2 sum 1/(l!(l+2)) = 2
    assert hyper_sum_S(0, 1.0) == pytest.approx(math.e - 1, rel=1e-14)
    assert hyper_sum_S(0, 0.5) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("key", sorted(FROZEN_S))
def test_frozen_values(key):
    assert hyper_sum_S(*key) == pytest.approx(FROZEN_S[key], rel=1e-13)


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0, 10.0])
def test_bounds_and_monotone_in_n(s):
    vals = [hyper_sum_S(n, s) for n in range(51)]
    assert all(1.0 <= v <= math.e + 1e-12 for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert abs(vals[0] - math.e) > 1e-12


@given(st.integers(0, 30), st.floats(0.01, 5.0), st.floats(0.01, 5.0))
@settings(max_examples=60, deadline=None)
def test_monotone_in_ratio(n, s1, s2):
    lo, hi = sorted((s1, s2))
    assert hyper_sum_S(n, hi) <= hyper_sum_S(n, lo) + 1e-15


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.0])
def test_reciprocal_identity(s):
    for n in range(21):
        assert abs(hyper_f_nx1(n, 1.0 / s) - hyper_sum_S(n, s)) <= 1e-12


def test_hyper_f_examples():
    assert hyper_f_nx1(2, 1e8) == pytest.approx(math.e, abs=1e-6)
    assert hyper_f_nx1(0, 1.0) == pytest.approx(math.e - 1, rel=1e-14)
    assert hyper_f_nx1(1, 2.0) == pytest.approx(1.601518708018565362, rel=1e-14)
    with pytest.raises(ValueError):
        hyper_f_nx1(1, 0.0)


def test_hypersum_cache_threadsafe():
    h = HyperSum(0.7)
    out = []

    def work():
        out.append([h(n) for n in range(40)])

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(o == out[0] for o in out)


def test_hypersum_rejects_negative():
    with pytest.raises(ValueError):
        hyper_sum_S(1, -0.1)


@pytest.mark.parametrize("f,expected", [
    (lambda r: r * np.exp(-r * r), 0.5),
    (lambda r: np.exp(-r * r), math.sqrt(math.pi) / 2),
])
def test_semi_infinite_closed_forms(f, expected):
    res = quad_semi_infinite(f)
    assert res.value == pytest.approx(expected, rel=1e-10)
    assert res.abs_error_estimate >= 0
    assert res.evaluations > 0


def test_semi_infinite_zero():
    assert quad_semi_infinite(lambda r: 0.0 * r).value == 0.0


@pytest.mark.parametrize("f,expected", [
    (lambda x: np.exp(-x * x), math.sqrt(math.pi)),
    (lambda x: x * x * np.exp(-x * x), math.sqrt(math.pi) / 2),
])
def test_real_line_closed_forms(f, expected):
    assert quad_real_line(f).value == pytest.approx(expected, rel=1e-10)


def test_real_line_odd():
    assert abs(quad_real_line(lambda x: x * np.exp(-x * x)).value) < 1e-14


def test_interval_polynomial():
    assert quad_interval(lambda x: x ** 5, 0.0, 2.0).value == pytest.approx(64 / 6, rel=1e-14)


def test_budget_exhaustion():
    with pytest.raises(QuadratureError):
        quad_semi_infinite(lambda r: np.exp(-r * r), max_evaluations=10)


@pytest.mark.parametrize("n", range(0, 11, 2))
@pytest.mark.parametrize("s", [0.3, 1.0])
def test_integral_identity(n, s):
    # int s^n e^{-s} exp(e^{-s_hat s} - 1) ds = n! S(n, s_hat) / e
    f = lambda t: t ** n * np.exp(-t) * np.exp(np.expm1(-s * t))
    q = quad_semi_infinite(f, scale=4.0).value
    assert q == pytest.approx(math.factorial(n) * hyper_sum_S(n, s) / math.e, rel=1e-8)
