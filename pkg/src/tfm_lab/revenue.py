"""Exact and Monte-Carlo revenue / value-surplus analysis.

Sampling is keyed by (seed, sample index): sample ``i`` of an ``n``-bidder
run always consumes the doubles at positions ``[i*n, (i+1)*n)`` of the Philox
stream for ``seed``.  Samples are processed in fixed-size chunks whose
moments are merged in chunk order, so results are bit-identical whatever
the number of worker partitions.

Bidding model: UPGA-style mechanisms (UPGA, WellReserved, MyersonUniform)
are DSIC and see truthful bids.  Pay-as-bid mechanisms are played at the
uniform equilibrium ``s(v)``; the supply-limited variant at the equilibrium
for ``limit`` items.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .equilibrium import (
    MAX_VERIFIED_K,
    UnverifiedRange,
    exponential_order_stat_mean,
    harmonic,
    shade_bid_uniform,
    uniform_order_stat_mean,
)
from .mechanisms import (
    GTA,
    PABGA,
    UPGA,
    Mechanism,
    MyersonUniform,
    Shading,
    SupplyLimitedPABGA,
    WellReserved,
)

CHUNK = 1 << 16  # samples per chunk; a multiple of 4 keeps chunks Philox-aligned
MIN_SAMPLES = 1000
SIGMAS = 3


class Unsupported(ValueError):
    """No bidding model is available for this (mechanism, distribution)."""


@dataclass(frozen=True)
class Uniform:
    """UNI([0, 1])."""

    name = "uniform"

    def draw(self, u: np.ndarray) -> np.ndarray:
        return u

    def __str__(self):
        return "UNI[0,1]"


@dataclass(frozen=True)
class Exponential:
    """EXP(zeta): density zeta * exp(-zeta x)."""

    zeta: Fraction = Fraction(1)
    name = "exponential"

    def __post_init__(self):
        zeta = Fraction(self.zeta)
        if zeta <= 0:
            raise ValueError("zeta must be positive")
        object.__setattr__(self, "zeta", zeta)

    def draw(self, u: np.ndarray) -> np.ndarray:
        return -np.log1p(-u) / float(self.zeta)

    def __str__(self):
        return f"EXP({self.zeta})"


def distribution(name: str, zeta=1) -> Uniform | Exponential:
    key = name.strip().lower()
    if key in ("uniform", "uni", "u"):
        return Uniform()
    if key in ("exponential", "exp", "e"):
        return Exponential(Fraction(zeta))
    raise ValueError(f"unknown distribution {name!r}; expected 'uniform' or 'exponential'")


@dataclass(frozen=True)
class RevenueEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    exact: Fraction | None = None
    excluded: int = 0

    def within(self, target, sigmas: float = SIGMAS) -> bool:
        return abs(self.mean - float(target)) <= sigmas * self.stderr

    def __str__(self):
        s = f"{self.mean:.6f} +/- {self.stderr:.2e} (N={self.samples})"
        return s + (f", exact {self.exact}" if self.exact is not None else "")


# ---------------------------------------------------------------------------
# streaming moments


@dataclass
class _Moments:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    excluded: int = 0

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        keep = ~np.isnan(x)
        y = x[keep]
        if y.size == 0:
            return cls(0, 0.0, 0.0, int(x.size))
        mu = float(y.mean())
        return cls(int(y.size), mu, float(((y - mu) ** 2).sum()), int(x.size - y.size))

    def merge(self, other: "_Moments") -> "_Moments":
        # Chan et al. pairwise combination
        n = self.count + other.count
        if n == 0:
            return _Moments(0, 0.0, 0.0, self.excluded + other.excluded)
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return _Moments(n, mean, m2, self.excluded + other.excluded)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count else math.nan


def _values_chunk(dist, seed: int, n: int, start: int, count: int) -> np.ndarray:
    assert (start * n) % 4 == 0
    bitgen = np.random.Philox(key=seed)
    bitgen.advance(start * n // 4)
    return dist.draw(np.random.Generator(bitgen).random((count, n)))


def stream_statistics(
    dist,
    n: int,
    samples: int,
    seed: int,
    statistics: Callable[[np.ndarray], Sequence[np.ndarray]],
    partitions: int = 1,
) -> list[_Moments]:
    """Apply ``statistics`` to chunks of drawn value matrices and merge moments.

    ``statistics`` maps a (count, n) value matrix to per-sample arrays; NaN
    entries are excluded and counted.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    starts = list(range(0, samples, CHUNK))

    def run(start):
        values = _values_chunk(dist, seed, n, start, min(CHUNK, samples - start))
        return [_Moments.of(np.asarray(s, dtype=float)) for s in statistics(values)]

    if partitions > 1:
        with ThreadPoolExecutor(partitions) as pool:
            per_chunk = list(pool.map(run, starts))
    else:
        per_chunk = [run(s) for s in starts]
    merged = per_chunk[0]
    for chunk in per_chunk[1:]:
        merged = [a.merge(b) for a, b in zip(merged, chunk)]
    return merged


# ---------------------------------------------------------------------------
# per-sample revenue


def _descending(values: np.ndarray) -> np.ndarray:
    return -np.sort(-values, axis=1)


def _slots(mech: Mechanism, n: int) -> int:
    return n if mech.block_size == math.inf else min(int(mech.block_size), n)


def _pay_as_bid_revenue(top: np.ndarray, n: int, k: int) -> np.ndarray:
    if k >= n:
        # everyone is allocated, so the equilibrium bid is 0
        return np.zeros(top.shape[0])
    return shade_bid_uniform(n, k, top[:, :k]).sum(axis=1)


def revenue_sampler(mech: Mechanism, dist, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """Per-sample miner revenue (payments net of burn) under the bidding model."""
    if isinstance(mech, GTA):
        raise Unsupported("GTA has a discrete bid space; Monte-Carlo revenue is not modelled")
    if isinstance(mech, (PABGA, Shading)):
        if not isinstance(dist, Uniform):
            raise Unsupported(f"{mech}: equilibrium bids are only known for uniform values")
        if isinstance(mech, Shading) and mech.n != n:
            raise ValueError(f"{mech} expects {mech.n} bidders, got n={n}")
        k = mech.limit if isinstance(mech, SupplyLimitedPABGA) else _slots(mech, n)
        if k > MAX_VERIFIED_K and k < n:
            raise UnverifiedRange(f"{mech}: equilibrium only verified for k <= {MAX_VERIFIED_K}")
        return lambda v: _pay_as_bid_revenue(_descending(v), n, k)
    if isinstance(mech, UPGA):
        if isinstance(mech, MyersonUniform) and not isinstance(dist, Uniform):
            raise Unsupported("Myerson reserve is only modelled for uniform values")
        if isinstance(mech, MyersonUniform) and mech.scale != 1:
            raise Unsupported("MyersonUniform needs scale 1 for UNI[0,1] values")
        k = _slots(mech, n)
        r = float(mech.reserve)
        burn = r if isinstance(mech, WellReserved) else 0.0

        def upga(v):
            top = _descending(v)
            kth_next = top[:, k] if k < n else np.zeros(top.shape[0])
            price = np.maximum(r, kth_next)
            count = (top[:, :k] >= r).sum(axis=1)
            return count * (price - burn)

        return upga
    raise Unsupported(f"no revenue model for {mech}")


def surplus_sampler(k: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda v: _descending(v)[:, :k].sum(axis=1)


def exact_surplus(dist, n: int, k: int) -> Fraction:
    k = min(k, n)
    if isinstance(dist, Uniform):
        return sum((uniform_order_stat_mean(n, i) for i in range(1, k + 1)), Fraction(0))
    return sum((exponential_order_stat_mean(n, i, dist.zeta) for i in range(1, k + 1)), Fraction(0))


def exact_revenue(mech: Mechanism, dist, n: int) -> Fraction | None:
    """Closed-form expected revenue where one is known, else None."""
    if isinstance(mech, WellReserved) and mech.reserve != 0:
        return None
    if isinstance(mech, MyersonUniform):
        return None
    if isinstance(mech, UPGA) and mech.reserve != 0:
        return None
    if isinstance(mech, GTA):
        return None
    k = mech.limit if isinstance(mech, SupplyLimitedPABGA) else _slots(mech, n)
    if isinstance(dist, Uniform):
        return uniform_pabga_revenue_exact(n, k)
    if isinstance(mech, UPGA):
        return k * exponential_order_stat_mean(n, k + 1, dist.zeta) if k < n else Fraction(0)
    return None


def mc_revenue_and_surplus(
    mech: Mechanism,
    dist,
    n: int,
    samples: int,
    seed: int = 0,
    partitions: int = 1,
) -> tuple[RevenueEstimate, RevenueEstimate, RevenueEstimate]:
    """Monte-Carlo revenue, value surplus (top-k values) and per-sample ratio.

    Samples with zero surplus are excluded from the ratio and counted.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    rev_fn = revenue_sampler(mech, dist, n)
    sur_fn = surplus_sampler(_slots(mech, n))

    def stats(v):
        rev, sur = rev_fn(v), sur_fn(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(sur > 0, rev / np.where(sur > 0, sur, 1.0), np.nan)
        return rev, sur, ratio

    rev, sur, ratio = stream_statistics(dist, n, samples, seed, stats, partitions)
    return (
        RevenueEstimate(rev.mean, rev.stderr, rev.count, seed, exact_revenue(mech, dist, n)),
        RevenueEstimate(sur.mean, sur.stderr, sur.count, seed, exact_surplus(dist, n, _slots(mech, n))),
        RevenueEstimate(ratio.mean, ratio.stderr, ratio.count, seed, None, ratio.excluded),
    )


# ---------------------------------------------------------------------------
# closed forms


def _check_k(n: int, k: int) -> None:
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")


def uniform_pabga_revenue_exact(n: int, k: int) -> Fraction:
    """k(n-k)/(n+1): k winners each paying the mean (k+1)-th value."""
    _check_k(n, k)
    return Fraction(k * (n - k), n + 1)


def uniform_ratio_of_expectations(n: int, k: int) -> Fraction:
    _check_k(n, k)
    return Fraction(n - k) / (Fraction(n + 1) - Fraction(k + 1, 2))


def exponential_ratio_of_expectations(n: int, k: int, zeta=1) -> Fraction:
    """Expected revenue over expected top-k surplus for EXP(zeta) values.

    Also asserts the surplus never exceeds the cruder bound k * H_n / zeta.
    """
    _check_k(n, k)
    if k >= n:
        raise ValueError(f"need k < n, got n={n}, k={k}")
    zeta = Fraction(zeta)
    if zeta <= 0:
        raise ValueError("zeta must be positive")
    h_n = harmonic(n)
    h = Fraction(0)
    surplus = Fraction(0)
    for i in range(1, k + 1):
        surplus += h_n - h  # h = H_{i-1}
        h += Fraction(1, i)
    revenue = k * (h_n - h)  # h = H_k here
    assert surplus / zeta <= k * h_n / zeta
    return revenue / surplus


# ---------------------------------------------------------------------------
# claim checks


@dataclass(frozen=True)
class ClaimResult:
    """One verified quantitative claim, in the shape of a CSV report row."""

    claim: str
    n: int
    k: int
    dist: str
    computed: float
    target: float
    stderr: float
    passed: bool
    relation: str = "~"
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def __str__(self):
        return (f"{self.claim} (n={self.n}, k={self.k}, {self.dist}): computed {self.computed:.6f} "
                f"{self.relation} {self.target:.6f} [stderr {self.stderr:.2e}] {self.verdict}")


def _paired(dist, n, samples, seed, fns, partitions=1):
    return stream_statistics(dist, n, samples, seed, lambda v: [f(v) for f in fns], partitions)


def revenue_mean_check(mech: Mechanism, n: int, samples: int, seed: int = 0, dist=None, partitions: int = 1) -> ClaimResult:
    """MC revenue of ``mech`` against its closed form, within 3 standard errors."""
    dist = dist or Uniform()
    rev, _, _ = mc_revenue_and_surplus(mech, dist, n, samples, seed, partitions)
    if rev.exact is None:
        raise Unsupported(f"no closed-form revenue for {mech}")
    return ClaimResult(f"{mech} revenue", n, _slots(mech, n), str(dist), rev.mean, float(rev.exact),
                       rev.stderr, rev.within(rev.exact), "~", {"exact": rev.exact})


def supply_limit_gain_check(n: int, k: int, limit: int, samples: int, seed: int = 0, partitions: int = 1) -> ClaimResult:
    """Limiting a pay-as-bid block to ``limit`` slots beats filling all k.

    Passes when the paired revenue gain exceeds 3 standard errors.
    """
    dist = Uniform()
    limited = revenue_sampler(SupplyLimitedPABGA(block_size=k, limit=limit), dist, n)
    full = revenue_sampler(PABGA(block_size=k), dist, n)
    (gain,) = _paired(dist, n, samples, seed, [lambda v: limited(v) - full(v)], partitions)
    return ClaimResult(f"SupplyLimitedPABGA(limit={limit}) - PABGA gain", n, k, str(dist), gain.mean, 0.0,
                       gain.stderr, gain.mean > SIGMAS * gain.stderr, ">",
                       {"exact_gain": uniform_pabga_revenue_exact(n, limit) - uniform_pabga_revenue_exact(n, k)})


def uniform_ratio_check(n: int, k: int, samples: int, seed: int = 0, partitions: int = 1) -> ClaimResult:
    """MC ratio of mean PABGA revenue to mean surplus versus the closed form.

    The stderr of the ratio of means comes from the delta method.
    """
    dist = Uniform()
    rev_fn = revenue_sampler(PABGA(block_size=k), dist, n)
    sur_fn = surplus_sampler(k)

    def stats(v):
        r, s = rev_fn(v), sur_fn(v)
        return r, s, r + s

    rev, sur, both = stream_statistics(dist, n, samples, seed, stats, partitions)
    rho = rev.mean / sur.mean
    cov = (both.variance - rev.variance - sur.variance) / 2
    var = (rev.variance - 2 * rho * cov + rho * rho * sur.variance) / (sur.mean**2 * rev.count)
    se = math.sqrt(max(var, 0.0))
    exact = uniform_ratio_of_expectations(n, k)
    return ClaimResult("E[Rev]/E[V] PABGA", n, k, str(dist), rho, float(exact), se,
                       abs(rho - float(exact)) <= SIGMAS * se, "~", {"exact": exact})


def expectation_of_ratio_check(n: int, k: int, samples: int, seed: int = 0, partitions: int = 1) -> ClaimResult:
    """E[Rev/V] for the uniform PABGA is at least (n-k)/n.

    Also checks s(v) >= (n-k)v/n on every drawn value (zero tolerance).
    """
    if k > MAX_VERIFIED_K:
        raise UnverifiedRange(f"k={k} outside the verified range k <= {MAX_VERIFIED_K}")
    if k >= n:
        raise ValueError(f"need k < n, got n={n}, k={k}")
    dist = Uniform()
    bound = Fraction(n - k, n)
    sur_fn = surplus_sampler(k)

    def stats(v):
        bids = shade_bid_uniform(n, k, v)
        shortfall = ((n - k) * v / n > bids).sum(axis=1).astype(float)
        top = _descending(bids)[:, :k].sum(axis=1)
        sur = sur_fn(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(sur > 0, top / np.where(sur > 0, sur, 1.0), np.nan)
        return ratio, shortfall

    ratio, shortfall = stream_statistics(dist, n, samples, seed, stats, partitions)
    pointwise_failures = int(round(shortfall.mean * shortfall.count))
    ok = ratio.mean >= float(bound) - SIGMAS * ratio.stderr and pointwise_failures == 0
    return ClaimResult("E[Rev/V] PABGA", n, k, str(dist), ratio.mean, float(bound), ratio.stderr, ok, ">=",
                       {"pointwise_failures": pointwise_failures, "excluded": ratio.excluded})


def bulow_klemperer_check(n: int, k: int, samples: int, seed: int = 0, partitions: int = 1) -> ClaimResult:
    """Uniform PABGA revenue >= (n-k)/n of the optimal (Myerson) revenue.

    Both revenues use the same draws; the test is on the paired difference.
    """
    _check_k(n, k)
    if k >= n:
        raise ValueError(f"need k < n, got n={n}, k={k}")
    dist = Uniform()
    factor = (n - k) / n
    pabga = revenue_sampler(PABGA(block_size=k), dist, n)
    myerson = revenue_sampler(MyersonUniform(block_size=k), dist, n)
    p, m, d = _paired(dist, n, samples, seed, [pabga, myerson, lambda v: pabga(v) - factor * myerson(v)], partitions)
    return ClaimResult("PABGA >= (n-k)/n * Myerson", n, k, str(dist), p.mean, factor * m.mean, d.stderr,
                       d.mean >= -SIGMAS * d.stderr, ">=", {"myerson": m.mean, "myerson_stderr": m.stderr})


def revenue_equivalence_check(n: int, k: int, samples: int, seed: int = 0, partitions: int = 1) -> ClaimResult:
    """Equilibrium PABGA and truthful UPGA earn the same expected revenue."""
    if k > MAX_VERIFIED_K:
        raise UnverifiedRange(f"k={k} outside the verified range k <= {MAX_VERIFIED_K}")
    _check_k(n, k)
    dist = Uniform()
    exact = uniform_pabga_revenue_exact(n, k)
    pabga = revenue_sampler(PABGA(block_size=k), dist, n)
    upga = revenue_sampler(UPGA(block_size=k), dist, n)
    p, u, d = _paired(dist, n, samples, seed, [pabga, upga, lambda v: pabga(v) - upga(v)], partitions)
    ok = (abs(d.mean) <= SIGMAS * d.stderr or d.stderr == 0 and d.mean == 0)
    ok = ok and abs(p.mean - float(exact)) <= SIGMAS * p.stderr and abs(u.mean - float(exact)) <= SIGMAS * u.stderr
    return ClaimResult("PABGA = UPGA revenue", n, k, str(dist), p.mean, float(exact), d.stderr, ok, "~",
                       {"upga": u.mean, "upga_stderr": u.stderr, "pabga_stderr": p.stderr, "exact": exact})


def revenue_optimal_class_check(n: int, k: int, reserve, samples: int, seed: int = 0, partitions: int = 1) -> ClaimResult:
    """PABGA revenue is at least that of WellReserved(k, reserve)."""
    dist = Uniform()
    pabga = revenue_sampler(PABGA(block_size=k), dist, n)
    well = revenue_sampler(WellReserved(block_size=k, reserve=Fraction(reserve)), dist, n)
    p, w, d = _paired(dist, n, samples, seed, [pabga, well, lambda v: pabga(v) - well(v)], partitions)
    return ClaimResult(f"PABGA >= WellReserved(r={Fraction(reserve)})", n, k, str(dist), p.mean, w.mean,
                       d.stderr, d.mean >= -SIGMAS * d.stderr, ">=", {"reserve": Fraction(reserve)})


def exponential_ratio_check(n: int, k: int, zeta=1, floor=Fraction(45, 100)) -> ClaimResult:
    """Exact finite-instance ratio for exponential values against ``floor``."""
    ratio = exponential_ratio_of_expectations(n, k, zeta)
    return ClaimResult("E[Rev]/E[V] EXP", n, k, str(Exponential(Fraction(zeta))), float(ratio), float(floor),
                       0.0, ratio >= floor, ">=", {"exact": ratio})
