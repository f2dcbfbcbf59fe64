import math
from fractions import Fraction as F
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfm_lab.equilibrium import (
    BisectionError,
    UnverifiedRange,
    best_response_gap,
    exponential_order_stat_mean,
    harmonic,
    inverse_bid,
    max_best_response_gap,
    monotonicity_failures,
    poly_P,
    shade_bid_uniform,
    shading_bound_failures,
    uniform_order_stat_mean,
    win_probability,
)


# --- oracle: envelope formula s(v) = v - int_0^v W / W(v), integrated exactly


def _win_poly(n, k):
    """Coefficients (ascending powers) of W(x) = sum_{i<k} C(n-1,i)(1-x)^i x^(n-1-i)."""
    coeffs = [F(0)] * n
    for i in range(k):
        for j in range(i + 1):
            coeffs[n - 1 - i + j] += comb(n - 1, i) * comb(i, j) * (-1) ** j
    return coeffs


def _eval(coeffs, x):
    return sum((c * x**p for p, c in enumerate(coeffs)), F(0))


def envelope_bid(n, k, v):
    w = _win_poly(n, k)
    integral = sum((c * v ** (p + 1) / (p + 1) for p, c in enumerate(w)), F(0))
    return v - integral / _eval(w, v)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(2, 14) for k in range(1, min(n - 1, 10) + 1)])
def test_closed_form_matches_envelope_oracle(n, k):
    for v in (F(1, 7), F(1, 2), F(9, 10), F(1)):
        assert shade_bid_uniform(n, k, v) == envelope_bid(n, k, v)


def test_poly_examples():
    assert poly_P(4, 2, 0.5) == pytest.approx(2.5)
    assert poly_P(3, 2, 1) == 1
    assert all(poly_P(n, 1, F(3, 7)) == 1 for n in range(1, 6))
    with pytest.raises(ValueError):
        poly_P(2, 3, 0.5)


@given(st.integers(2, 30), st.integers(1, 10), st.fractions(0, 1, max_denominator=50))
def test_poly_float_path_agrees_with_exact_sum(n, k, v):
    k = min(k, n)
    assert poly_P(n, k, float(v)) == pytest.approx(float(poly_P(n, k, v)), rel=1e-12)
    arr = poly_P(n, k, np.array([float(v)]))
    assert arr[0] == pytest.approx(float(poly_P(n, k, v)), rel=1e-12)


def test_bid_examples():
    assert shade_bid_uniform(2, 1, 0.8) == pytest.approx(0.4)
    assert shade_bid_uniform(4, 2, 1.0) == pytest.approx(0.5)
    assert shade_bid_uniform(4, 2, F(1)) == F(1, 2)
    assert shade_bid_uniform(7, 3, 0) == 0
    assert shade_bid_uniform(7, 3, 0.0) == 0.0


def test_bid_preconditions():
    with pytest.raises(UnverifiedRange):
        shade_bid_uniform(20, 11, 0.5)
    assert shade_bid_uniform(20, 11, 0.5, allow_unverified=True) > 0
    with pytest.raises(ValueError):
        shade_bid_uniform(3, 3, 0.5)


def test_win_probability_examples():
    assert win_probability(2, 1, 0.3) == pytest.approx(0.3)
    assert win_probability(5, 5, 0.2) == pytest.approx(1.0)
    assert win_probability(4, 2, F(1, 2)) == F(1, 2)


@given(st.integers(2, 20), st.integers(1, 10), st.floats(0.01, 0.99))
def test_inverse_bid_round_trips(n, k, v):
    k = min(k, n - 1)
    b = shade_bid_uniform(n, k, v)
    root = inverse_bid(n, k, b)[0]
    # s can be flatter than float resolution near 1, so compare in bid space
    assert shade_bid_uniform(n, k, root) == pytest.approx(b, abs=1e-12)
    if v < 0.5:
        assert root == pytest.approx(v, abs=1e-9)


def test_inverse_bid_detects_non_monotone_bid(monkeypatch):
    import tfm_lab.equilibrium as eq

    monkeypatch.setattr(eq, "shade_bid_uniform", lambda n, k, v, allow_unverified=False: np.abs(np.asarray(v) - 0.5) * 0 + 0.1)
    with pytest.raises(BisectionError):
        eq.inverse_bid(3, 1, np.array([0.05]))


def test_best_response_examples():
    assert best_response_gap(2, 1, 0.5, 1e-3) <= 1e-3
    assert best_response_gap(5, 2, 0.7, 1e-3) <= 2e-3
    assert best_response_gap(4, 2, 0, 1e-3) == 0
    # deviating to a visibly wrong bid is strictly worse than the equilibrium
    assert best_response_gap(5, 2, 0.7, 0.35) < 0


def test_sweeps_small():
    assert monotonicity_failures(12) == []
    assert shading_bound_failures(12) == []
    gap, where = max_best_response_gap(range(2, 6), [0.3, 0.8])
    assert gap <= 2e-3 and where is not None


@given(st.integers(2, 64), st.integers(1, 10), st.floats(0, 1))
def test_shading_bound(n, k, v):
    k = min(k, n - 1)
    s = shade_bid_uniform(n, k, v)
    assert (n - k) * v / n <= s <= v


def test_order_statistics():
    assert uniform_order_stat_mean(4, 1) == F(4, 5)
    assert uniform_order_stat_mean(4, 4) == F(1, 5)
    assert uniform_order_stat_mean(10, 4) == F(7, 11)
    assert exponential_order_stat_mean(4, 1, 1) == F(25, 12)
    assert exponential_order_stat_mean(4, 2, 1) == F(13, 12)
    assert exponential_order_stat_mean(6, 6, 3) == F(1, 18)
    with pytest.raises(ValueError):
        uniform_order_stat_mean(3, 4)
    with pytest.raises(ValueError):
        exponential_order_stat_mean(3, 0)


@given(st.integers(1, 40))
def test_uniform_means_sum_to_half_n(n):
    assert sum(uniform_order_stat_mean(n, i) for i in range(1, n + 1)) == F(n, 2)


@given(st.integers(2, 40), st.integers(1, 9))
def test_exponential_means_telescope(n, z):
    for i in range(1, n):
        diff = exponential_order_stat_mean(n, i, z) - exponential_order_stat_mean(n, i + 1, z)
        assert diff == F(1, z * i)


def test_harmonic():
    assert harmonic(0) == 0
    assert harmonic(1) == 1
    assert harmonic(4) == F(25, 12)
    assert harmonic(200) == sum(F(1, i) for i in range(1, 201))
    assert float(harmonic(10**4)) == pytest.approx(math.log(10**4) + 0.5772156649 + 1 / (2 * 10**4), rel=1e-9)
