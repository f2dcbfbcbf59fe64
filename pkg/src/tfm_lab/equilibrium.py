"""Symmetric Bayes-Nash bidding in the pay-as-bid greedy auction.

Valuations are iid UNI([0,1]).  With ``n`` bidders and ``k`` items the
equilibrium bid is

    s(v) = ((n - k) v / n) * P(n, k, v) / P(n - 1, k, v)

with ``P`` the polynomial of :func:`poly_P`.  The closed form has only been
verified for k <= 10; larger k must be requested explicitly.

Order-statistic means for the uniform and exponential families and the
harmonic numbers they need live here as well.
"""
from __future__ import annotations

import math
from fractions import Fraction
from math import comb

import numpy as np

MAX_VERIFIED_K = 10
BISECTION_TOL = 1e-12


class UnverifiedRange(ValueError):
    """The closed-form bid function is only established for k <= 10."""


class BisectionError(RuntimeError):
    """Inverting the bid function failed; the bid function is not monotone."""


def _check_nk(n: int, k: int) -> None:
    if k < 1 or n < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")


def poly_P(n: int, k: int, v):
    """Evaluate P(n, k, v) = sum_{i<k} C(n, n-i) C(n-i-1, n-k) (-v)^(k-1-i).

    Rational or integer ``v`` is evaluated exactly from that sum.  Floats and
    arrays use the equivalent expansion sum_{j<k} C(n-k+j, j) (1-v)^j, whose
    terms are all non-negative on [0, 1] and so do not cancel.
    """
    _check_nk(n, k)
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        v = Fraction(v)
        return sum(
            (comb(n, n - i) * comb(n - i - 1, n - k) * (-v) ** (k - 1 - i) for i in range(k)),
            Fraction(0),
        )
    if isinstance(v, np.ndarray):
        u = 1.0 - v
        total = np.zeros_like(u, dtype=float)
        power = np.ones_like(u, dtype=float)
        for j in range(k):
            total += comb(n - k + j, j) * power
            power = power * u
        return total
    u = 1.0 - float(v)
    return math.fsum(comb(n - k + j, j) * u**j for j in range(k))


def _check_bid_range(n: int, k: int, allow_unverified: bool) -> None:
    _check_nk(n, k)
    if k >= n:
        raise ValueError(f"equilibrium bid needs k < n, got n={n}, k={k}")
    if k > MAX_VERIFIED_K and not allow_unverified:
        raise UnverifiedRange(
            f"closed-form bid only verified for k <= {MAX_VERIFIED_K} (got k={k}); "
            "pass allow_unverified=True to evaluate anyway"
        )


def shade_bid_uniform(n: int, k: int, v, *, allow_unverified: bool = False):
    """Equilibrium bid of a bidder with value ``v`` (scalar, Fraction or array)."""
    _check_bid_range(n, k, allow_unverified)
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        v = Fraction(v)
        if v == 0:
            return Fraction(0)
        return Fraction(n - k, n) * v * poly_P(n, k, v) / poly_P(n - 1, k, v)
    if isinstance(v, np.ndarray):
        v = v.astype(float)
    else:
        v = float(v)
    # bound * ratio, ratio >= 1 in floating point too since both polynomials
    # are sums of the same non-negative powers with ordered coefficients.
    bound = (n - k) * v / n
    return bound * (poly_P(n, k, v) / poly_P(n - 1, k, v))


def win_probability(n: int, k: int, v):
    """Probability that value ``v`` is among the top k of n iid uniforms.

    Equals P(at most k-1 of the n-1 opponents exceed v).
    """
    if isinstance(v, np.ndarray):
        v = v.astype(float)
        total = np.zeros_like(v)
        for i in range(min(k, n)):
            total += comb(n - 1, i) * (1.0 - v) ** i * v ** (n - 1 - i)
        return total
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        v = Fraction(v)
        return sum((comb(n - 1, i) * (1 - v) ** i * v ** (n - 1 - i) for i in range(min(k, n))), Fraction(0))
    v = float(v)
    return math.fsum(comb(n - 1, i) * (1.0 - v) ** i * v ** (n - 1 - i) for i in range(min(k, n)))


def inverse_bid(n: int, k: int, b, *, tol: float = BISECTION_TOL, allow_unverified: bool = False):
    """Value whose equilibrium bid is ``b``, by bisection on [0, 1].

    Bids at or above s(1) map to 1.  Vectorised over array input.
    """
    b = np.atleast_1d(np.asarray(b, dtype=float))
    top = float(shade_bid_uniform(n, k, 1.0, allow_unverified=allow_unverified))
    lo = np.zeros_like(b)
    hi = np.ones_like(b)
    iterations = int(math.ceil(math.log2(1.0 / tol))) + 2
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = shade_bid_uniform(n, k, mid, allow_unverified=allow_unverified) < b
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    root = np.where(b >= top, 1.0, 0.5 * (lo + hi))
    inside = b < top
    residual = np.abs(shade_bid_uniform(n, k, root, allow_unverified=allow_unverified) - b)
    # s has slope <= 1, so a root within tol leaves a residual within tol.
    if np.any(inside & ((hi - lo > 2 * tol) | (residual > 1e-9))):
        raise BisectionError(f"bid inversion failed for n={n}, k={k}")
    return root


def best_response_gap(n: int, k: int, v: float, grid_step: float, *, allow_unverified: bool = False) -> float:
    """Best deviation utility on a bid grid minus the equilibrium utility.

    Opponents play s; a bid b wins with probability W(s^-1(b)).  For a true
    equilibrium the result is at most about ``grid_step`` (and typically <= 0).
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    v = float(v)
    s_v = float(shade_bid_uniform(n, k, v, allow_unverified=allow_unverified))
    equilibrium = float(win_probability(n, k, v)) * (v - s_v)
    if v == 0.0:
        return 0.0
    m = int(math.floor(v / grid_step + 1e-9))
    grid = np.arange(m + 1) * grid_step
    grid = grid[grid <= v]
    values = inverse_bid(n, k, grid, allow_unverified=allow_unverified)
    deviation = win_probability(n, k, values) * (v - grid)
    return float(deviation.max()) - equilibrium


def harmonic(n: int) -> Fraction:
    """Exact n-th harmonic number, H_0 = 0."""
    if n < 0:
        raise ValueError("harmonic number needs n >= 0")
    if n == 0:
        return Fraction(0)

    # binary splitting keeps the intermediate numerators small
    def split(a: int, b: int) -> tuple[int, int]:
        if b - a == 1:
            return 1, a
        m = (a + b) // 2
        p1, q1 = split(a, m)
        p2, q2 = split(m, b)
        return p1 * q2 + p2 * q1, q1 * q2

    p, q = split(1, n + 1)
    return Fraction(p, q)


def uniform_order_stat_mean(n: int, i: int) -> Fraction:
    """Mean of the i-th highest of n iid UNI([0,1]) draws."""
    if not 1 <= i <= n:
        raise ValueError(f"order index {i} outside [1, {n}]")
    return Fraction(n + 1 - i, n + 1)


def exponential_order_stat_mean(n: int, i: int, zeta=1) -> Fraction:
    """Mean of the i-th highest of n iid EXP(zeta) draws: (H_n - H_{i-1}) / zeta."""
    if not 1 <= i <= n:
        raise ValueError(f"order index {i} outside [1, {n}]")
    zeta = Fraction(zeta)
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    return (harmonic(n) - harmonic(i - 1)) / zeta


def verified_pairs(n_values) -> list[tuple[int, int]]:
    """All (n, k) with 1 <= k <= min(n-1, 10) for the given n."""
    return [(n, k) for n in n_values for k in range(1, min(n - 1, MAX_VERIFIED_K) + 1)]


def monotonicity_failures(n_max: int = 64, step=Fraction(1, 1000)) -> list[tuple[int, int]]:
    """(n, k) pairs where s is not strictly increasing on the grid over (0, 1].

    For large k the bid curve flattens near v = 1 below float resolution, so
    neighbours whose float increment is within rounding noise are compared
    again in exact rational arithmetic.
    """
    step = Fraction(step)
    points = int(1 / step)
    v = np.arange(1, points + 1) * float(step)
    bad = []
    for n, k in verified_pairs(range(2, n_max + 1)):
        d = np.diff(shade_bid_uniform(n, k, v))
        for j in np.flatnonzero(d <= 1e-12):
            lo = shade_bid_uniform(n, k, step * int(j + 1))
            hi = shade_bid_uniform(n, k, step * int(j + 2))
            if not hi > lo:
                bad.append((n, k))
                break
    return bad


def shading_bound_failures(n_max: int = 64, step: float = 1e-3) -> list[tuple[int, int]]:
    """(n, k) pairs where (n-k)v/n <= s(v) <= v fails somewhere on the grid."""
    v = np.arange(0, int(round(1 / step)) + 1) * step
    bad = []
    for n, k in verified_pairs(range(2, n_max + 1)):
        s = shade_bid_uniform(n, k, v)
        if not (np.all((n - k) * v / n <= s) and np.all(s <= v)):
            bad.append((n, k))
    return bad


def max_best_response_gap(n_values=range(2, 13), v_values=None, grid_step: float = 1e-3):
    """Largest best-response gap over the grid, with the (n, k, v) attaining it."""
    if v_values is None:
        v_values = [j / 10 for j in range(1, 10)]
    worst = (-math.inf, None)
    for n, k in verified_pairs(n_values):
        for v in v_values:
            gap = best_response_gap(n, k, v, grid_step)
            if gap > worst[0]:
                worst = (gap, (n, k, v))
    return worst
