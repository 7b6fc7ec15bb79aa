import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from scdf.special import (
    check_exp_log_integral,
    compensated_sum,
    exp_log_integral,
    exp_log_integral_quad,
    factorial,
    scaled_expn,
    truncated_exp_series,
    upper_incomplete_gamma_int,
)


def product_factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


@pytest.mark.parametrize("n, expected", [(0, 1), (5, 120), (20, product_factorial(20))])
def test_factorial(n, expected):
    assert factorial(n) == expected


def test_factorial_range():
    assert factorial(170) == pytest.approx(math.factorial(170), rel=1e-15)
    with pytest.raises(OverflowError):
        factorial(171)
    with pytest.raises(ValueError):
        factorial(-1)
    with pytest.raises(TypeError):
        factorial(2.5)


def test_upper_incomplete_gamma_examples():
    assert upper_incomplete_gamma_int(1, 0.0) == 1.0
    assert upper_incomplete_gamma_int(1, math.log(2)) == pytest.approx(0.5, abs=1e-15)
    quad = integrate.quad(lambda t: t**2 * math.exp(-t), 1.0, math.inf, epsabs=0, epsrel=1e-13)[0]
    assert upper_incomplete_gamma_int(3, 1.0) == pytest.approx(quad, rel=1e-12)
    assert upper_incomplete_gamma_int(3, 1.0) == pytest.approx(1.83940, abs=1e-5)


@settings(max_examples=200)
@given(st.integers(1, 30), st.floats(0, 50), st.floats(0, 5))
def test_upper_incomplete_gamma_bounds_and_monotone(n, x, dx):
    v = upper_incomplete_gamma_int(n, x)
    assert 0 < v <= math.factorial(n - 1) * (1 + 1e-15)
    assert upper_incomplete_gamma_int(n, x + dx) <= v * (1 + 1e-14)


@given(st.integers(1, 30), st.floats(0, 40))
def test_upper_incomplete_gamma_matches_scipy(n, x):
    ref = special.gammaincc(n, x) * math.gamma(n)
    assert upper_incomplete_gamma_int(n, x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("m, x, expected", [(1, 7.3, 1.0), (2, 0.0, 1.0), (3, 2.0, 5.0)])
def test_truncated_exp_series_examples(m, x, expected):
    assert truncated_exp_series(m, x) == expected


def test_truncated_exp_series_limit():
    assert abs(truncated_exp_series(60, 5.0) / math.exp(5.0) - 1) < 1e-12


@given(st.integers(1, 40), st.floats(0, 30))
def test_truncated_exp_series_below_exp(m, x):
    assert truncated_exp_series(m, x) <= math.exp(x) * (1 + 1e-15)


def test_truncated_exp_series_vectorized():
    x = np.array([0.0, 0.5, 2.0])
    np.testing.assert_allclose(truncated_exp_series(3, x), 1 + x + x**2 / 2, rtol=1e-15)


def test_compensated_sum_recovers_cancelled_digits():
    terms = [1e16, 1.0, -1e16, 1.0]
    assert compensated_sum(terms) == 2.0
    assert sum(terms) != 2.0
    arr = compensated_sum([np.array([1e16, 3.0]), np.array([1.0, 1.0]), np.array([-1e16, -3.0])])
    np.testing.assert_array_equal(arr, [1.0, 1.0])


def test_scaled_expn_branches_agree():
    for p in (1, 2, 5):
        for x in (0.1, 1.0, 50.0, 599.0):
            assert scaled_expn(p, x) == pytest.approx(math.exp(x) * special.expn(p, x), rel=1e-13)
    # asymptotic branch joins the direct one smoothly
    for p in (1, 3, 9):
        below, above = scaled_expn(p, 599.999), scaled_expn(p, 600.001)
        assert above == pytest.approx(below, rel=1e-5)
        assert 1 / (600 + p) < above < 1 / 600


def test_exp_log_integral_examples():
    e1 = special.exp1
    assert exp_log_integral(0, 1.0) == pytest.approx(math.e * e1(1.0), rel=1e-14)
    assert exp_log_integral(0, 1.0) == pytest.approx(0.596347, abs=1e-6)
    assert exp_log_integral(0, 2.0) == pytest.approx(math.exp(2) * e1(2.0) / 2, rel=1e-14)
    assert exp_log_integral(0, 2.0) == pytest.approx(0.180664, abs=1e-6)
    quad = integrate.quad(lambda x: x * math.exp(-x) * math.log1p(x), 0, math.inf, epsabs=0, epsrel=1e-12)[0]
    assert exp_log_integral(1, 1.0) == pytest.approx(quad, rel=1e-10)


@pytest.mark.parametrize("n", range(9))
@pytest.mark.parametrize("a", [0.1, 0.5, 1, 2, 5, 10])
def test_exp_log_integral_closed_form_vs_quadrature(n, a):
    closed = exp_log_integral(n, a)
    quad = exp_log_integral_quad(n, a)
    assert abs(closed - quad) / quad < 1e-8


def test_exp_log_integral_self_check():
    assert check_exp_log_integral() < 1e-8


def test_exp_log_integral_domain():
    with pytest.raises(ValueError):
        exp_log_integral(0, 0.0)
    with pytest.raises(ValueError):
        exp_log_integral_quad(1, -1.0)
