from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tfm_lab.equilibrium import UnverifiedRange, harmonic
from tfm_lab.mechanisms import GTA, PABGA, UPGA, MyersonUniform, Shading, SupplyLimitedPABGA, WellReserved
from tfm_lab.revenue import (
    CHUNK,
    Exponential,
    Uniform,
    Unsupported,
    _Moments,
    bulow_klemperer_check,
    distribution,
    expectation_of_ratio_check,
    exponential_ratio_of_expectations,
    mc_revenue_and_surplus,
    revenue_equivalence_check,
    revenue_optimal_class_check,
    revenue_sampler,
    stream_statistics,
    uniform_pabga_revenue_exact,
    uniform_ratio_of_expectations,
)


def test_uniform_closed_forms():
    assert uniform_pabga_revenue_exact(4, 3) == F(3, 5)
    assert uniform_pabga_revenue_exact(4, 2) == F(4, 5)
    assert uniform_pabga_revenue_exact(6, 6) == 0
    assert uniform_ratio_of_expectations(4, 2) == F(4, 7)
    assert uniform_ratio_of_expectations(10, 3) == F(7, 9)
    assert uniform_ratio_of_expectations(5, 5) == 0
    with pytest.raises(ValueError):
        uniform_pabga_revenue_exact(3, 4)


def test_exponential_ratio():
    assert exponential_ratio_of_expectations(4, 1, 1) == F(13, 25)
    assert exponential_ratio_of_expectations(9, 4, 1) == exponential_ratio_of_expectations(9, 4, 7)
    with pytest.raises(ValueError):
        exponential_ratio_of_expectations(3, 3)


def test_exponential_ratio_against_direct_sums():
    n, k = 30, 7
    h = [harmonic(i) for i in range(n + 1)]
    direct = k * (h[n] - h[k]) / sum(h[n] - h[i - 1] for i in range(1, k + 1))
    assert exponential_ratio_of_expectations(n, k) == direct


def test_distribution_parsing():
    assert isinstance(distribution("uniform"), Uniform)
    assert distribution("exp", "1/2") == Exponential(F(1, 2))
    with pytest.raises(ValueError):
        distribution("cauchy")
    with pytest.raises(ValueError):
        Exponential(0)


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50), st.integers(1, 49))
def test_moment_merge_matches_numpy(xs, cut):
    x = np.array(xs)
    cut = min(cut, len(xs) - 1)
    m = _Moments.of(x[:cut]).merge(_Moments.of(x[cut:]))
    assert m.count == len(xs)
    assert m.mean == pytest.approx(x.mean(), abs=1e-9)
    assert m.variance == pytest.approx(x.var(ddof=1), rel=1e-9, abs=1e-9)


def test_nan_samples_are_excluded_and_counted():
    m = _Moments.of(np.array([1.0, np.nan, 3.0]))
    assert (m.count, m.excluded, m.mean) == (2, 1, 2.0)


def test_stream_is_keyed_by_sample_index():
    n, samples = 3, CHUNK + 100
    (first,) = stream_statistics(Uniform(), n, samples, 9, lambda v: [v[:, 0]])
    (again,) = stream_statistics(Uniform(), n, samples, 9, lambda v: [v[:, 0]], partitions=3)
    assert first == again
    direct = np.random.Generator(np.random.Philox(key=9)).random((samples, n))[:, 0]
    assert first.mean == pytest.approx(direct.mean(), rel=1e-12)


def test_estimates_are_reproducible_and_seed_dependent():
    a = mc_revenue_and_surplus(PABGA(2), Uniform(), 4, 5000, seed=11)
    b = mc_revenue_and_surplus(PABGA(2), Uniform(), 4, 5000, seed=11, partitions=2)
    c = mc_revenue_and_surplus(PABGA(2), Uniform(), 4, 5000, seed=12)
    assert a == b and a[0].mean != c[0].mean


def test_mc_preconditions():
    with pytest.raises(ValueError):
        mc_revenue_and_surplus(PABGA(2), Uniform(), 4, 10)
    with pytest.raises(Unsupported):
        mc_revenue_and_surplus(GTA(), Uniform(), 4, 2000)
    with pytest.raises(Unsupported):
        mc_revenue_and_surplus(PABGA(2), Exponential(), 4, 2000)
    with pytest.raises(Unsupported):
        mc_revenue_and_surplus(MyersonUniform(1, scale=4), Uniform(), 4, 2000)
    with pytest.raises(ValueError):
        mc_revenue_and_surplus(Shading(n=3, block_size=1), Uniform(), 4, 2000)


def test_truthful_upga_revenue_and_payments():
    v = np.array([[0.9, 0.2, 0.5, 0.7]])
    assert revenue_sampler(UPGA(2), Uniform(), 4)(v)[0] == pytest.approx(2 * 0.5)
    assert revenue_sampler(UPGA(2, reserve=F(3, 5)), Uniform(), 4)(v)[0] == pytest.approx(2 * 0.6)
    assert revenue_sampler(WellReserved(2, reserve=F(3, 5)), Uniform(), 4)(v)[0] == pytest.approx(0.0)
    assert revenue_sampler(MyersonUniform(1), Uniform(), 4)(v)[0] == pytest.approx(0.7)
    # everyone fits, so nobody shades above zero
    assert revenue_sampler(PABGA(5), Uniform(), 4)(v)[0] == 0


@pytest.mark.parametrize("mech", [PABGA(2), UPGA(2), WellReserved(2, reserve=F(1, 4)), SupplyLimitedPABGA(3, limit=2)], ids=str)
def test_revenue_never_exceeds_surplus(mech):
    v = np.random.default_rng(0).random((2000, 5))
    rev = revenue_sampler(mech, Uniform(), 5)(v)
    top = -np.sort(-v, axis=1)[:, : mech.block_size].sum(axis=1)
    assert np.all(rev <= top + 1e-12) and np.all(rev >= 0)


def test_mc_matches_exact_small():
    rev, sur, ratio = mc_revenue_and_surplus(UPGA(3), Uniform(), 10, 200_000, seed=2)
    assert rev.exact == F(21, 11) and rev.within(rev.exact)
    assert sur.exact == F(27, 11) and sur.within(sur.exact)
    assert ratio.excluded == 0
    rev, sur, _ = mc_revenue_and_surplus(UPGA(3), Exponential(2), 10, 200_000, seed=2)
    assert rev.within(rev.exact) and sur.within(sur.exact)


def test_claim_checks_small():
    assert bulow_klemperer_check(2, 1, 50_000, 1).passed
    assert revenue_equivalence_check(5, 1, 50_000, 1).passed
    r = expectation_of_ratio_check(4, 2, 50_000, 1)
    assert r.passed and r.details["pointwise_failures"] == 0
    assert revenue_optimal_class_check(4, 2, F(1, 4), 50_000, 1).passed
    with pytest.raises(UnverifiedRange):
        expectation_of_ratio_check(20, 11, 2000)
    with pytest.raises(ValueError):
        bulow_klemperer_check(3, 3, 2000)
