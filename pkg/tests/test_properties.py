from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import ChargeUnallocated, DoubleBurnPABGA, OverchargePABGA
from tfm_lab.core import BidProfile, joint_utility, miner_utility
from tfm_lab.mechanisms import (
    GTA,
    PABGA,
    UPGA,
    MyersonUniform,
    SupplyLimitedPABGA,
    TopBidBurnPABGA,
    WellReserved,
)
from tfm_lab.properties import (
    BudgetExceeded,
    CheckConfig,
    Counterexample,
    Property,
    Verdict,
    audit_revenue_bound,
    best_block,
    brute_force_block,
    check_dsic,
    check_epbb,
    check_epir,
    check_mmic,
    check_oca,
    check_scp,
    check_separable,
    run_check,
    validate_oca_structure,
)

SMALL = CheckConfig(n=2, grid_max=3, max_fake=1)


# --- miner best response against subset enumeration

mechs = st.sampled_from([GTA(), PABGA(1), PABGA(2), UPGA(1), UPGA(2, reserve=1), WellReserved(2, reserve=1),
                         MyersonUniform(1, scale=4), SupplyLimitedPABGA(3, limit=2), TopBidBurnPABGA(2)])


@given(mechs, st.lists(st.integers(0, 4), min_size=1, max_size=3), st.lists(st.integers(0, 4), max_size=2),
       st.lists(st.integers(0, 4), min_size=3, max_size=3), st.sets(st.integers(0, 2)))
def test_best_block_matches_subset_enumeration(mech, real, fakes, values, coalition):
    bids = tuple(F(b) for b in real + fakes)
    coalition = tuple(sorted(c for c in coalition if c < len(real)))
    vals = tuple(F(v) for v in values[: len(real)])
    fast, alloc = best_block(mech, bids, len(real), vals, coalition)
    slow, _ = brute_force_block(mech, bids, len(real), vals, coalition)
    assert fast == slow
    assert mech.feasible(bids, alloc)
    prof = BidProfile(bids, len(real))
    assert joint_utility(mech.outcome(bids, alloc), coalition, vals, prof) == fast


# --- spec examples, one per checker


def test_epir():
    assert check_epir(GTA(), SMALL).verdict is Verdict.HOLDS_ON_GRID
    assert check_epir(UPGA(2), SMALL).verdict is Verdict.HOLDS_ON_GRID
    bad = check_epir(OverchargePABGA(1), SMALL)
    assert bad.verdict is Verdict.VIOLATED and bad.counterexample.replay(OverchargePABGA(1))
    loser = check_epir(ChargeUnallocated(1), SMALL)
    assert loser.verdict is Verdict.VIOLATED and "unallocated" in loser.counterexample.reason


def test_epbb():
    assert check_epbb(WellReserved(2, reserve=1), SMALL).holds
    assert check_epbb(PABGA(2), SMALL).holds
    bad = check_epbb(DoubleBurnPABGA(1), SMALL)
    assert bad.verdict is Verdict.VIOLATED and bad.counterexample.replay(DoubleBurnPABGA(1))


def test_dsic():
    assert check_dsic(GTA(), CheckConfig(n=3, grid_max=3)).verdict is Verdict.HOLDS_ON_GRID
    assert check_dsic(UPGA(2), CheckConfig(n=3, grid_max=3)).verdict is Verdict.HOLDS_ON_GRID
    report = check_dsic(PABGA(1), CheckConfig(n=2, grid_max=3))
    cex = report.counterexample
    assert report.verdict is Verdict.VIOLATED and cex.replay(PABGA(1))
    assert cex.after > cex.before


def test_pabga_shading_transcript_replays():
    # value 3 against a rival bid of 1: truthful utility 0, bidding 2 earns 1
    cex = Counterexample(Property.DSIC, values=(F(3), F(1)), honest_bids=(F(3), F(1)), bids=(F(2), F(1)),
                         real_count=2, bidder=0, before=F(0), after=F(1))
    assert cex.replay(PABGA(1))


def test_mmic():
    assert check_mmic(GTA(), CheckConfig(n=3, grid_max=3, max_fake=2)).holds
    assert check_mmic(PABGA(2), CheckConfig(n=3, grid_max=3, max_fake=2)).holds
    report = check_mmic(UPGA(1), CheckConfig(n=2, grid_max=5, max_fake=1))
    assert report.verdict is Verdict.VIOLATED
    assert report.counterexample.fakes and report.counterexample.replay(UPGA(1))


def test_fake_bid_transcript_replays():
    cex = Counterexample(Property.MMIC, values=(F(5), F(1)), honest_bids=(F(5), F(1)), bids=(F(5), F(1), F(4)),
                         real_count=2, allocation=(1, 0, 0), before=F(1), after=F(4))
    assert cex.replay(UPGA(1))
    # an infeasible block (fake charged above its bid) does not replay
    assert not replace(cex, allocation=(1, 1, 1)).replay(UPGA(1))


def test_scp():
    assert check_scp(GTA(), CheckConfig(n=2, grid_max=3, max_fake=1)).holds
    report = check_scp(UPGA(1), CheckConfig(n=2, grid_max=5, coalition_bound=1))
    assert report.verdict is Verdict.VIOLATED and report.counterexample.coalition
    assert report.counterexample.replay(UPGA(1))
    assert any("truthful" in n for n in report.notes)


def test_scp_price_raise_transcript_replays():
    cex = Counterexample(Property.SCP, values=(F(5), F(1)), honest_bids=(F(5), F(1)), bids=(F(5), F(4)),
                         real_count=2, coalition=(1,), allocation=(1, 0), before=F(1), after=F(4))
    assert cex.replay(UPGA(1))


def test_scp_holds_for_under_demanded_well_reserved():
    cfg = CheckConfig(n=2, grid_max=3, max_fake=1)
    assert check_scp(WellReserved(3, reserve=1), cfg).verdict is Verdict.HOLDS_ON_GRID


def test_oca():
    assert check_oca(GTA(), CheckConfig(n=2, grid_max=3, max_fake=2)).holds
    assert check_oca(PABGA(2), CheckConfig(n=3, grid_max=3, max_fake=1)).holds
    mech = MyersonUniform(1, scale=4)
    report = check_oca(mech, CheckConfig(n=2, grid_max=4, max_fake=1))
    cex = report.counterexample
    assert report.verdict is Verdict.VIOLATED and cex.replay(mech)
    # the below-reserve bidder is allocated anyway
    assert any(cex.allocation[i] and cex.values[i] < mech.reserve for i in range(len(cex.values)))


def test_separability_sees_fake_padded_vectors():
    # with n <= k the (k+1)-th bid only appears once a fake is added
    assert check_separable(UPGA(2, reserve=1), CheckConfig(n=2, grid_max=2)).holds
    assert not check_separable(UPGA(2, reserve=1), CheckConfig(n=2, grid_max=2, max_fake=1)).holds


def test_separable():
    assert check_separable(GTA(), SMALL).holds
    assert check_separable(PABGA(2), SMALL).holds
    report = check_separable(UPGA(1), SMALL)
    assert report.verdict is Verdict.VIOLATED and report.counterexample.replay(UPGA(1))


def test_oca_structure():
    cfg = CheckConfig(n=3, grid_max=3)
    well = validate_oca_structure(WellReserved(2, reserve=1), cfg)
    assert well.holds and well.details["cardinal"].cardinal == (0, 1, 2)
    pabga = validate_oca_structure(PABGA(2), cfg)
    assert pabga.holds and pabga.details["cardinal"].cardinal == (0, 0, 0)
    bad = validate_oca_structure(TopBidBurnPABGA(2), cfg)
    assert bad.verdict is Verdict.VIOLATED and bad.counterexample.reason.startswith("(a)")
    assert bad.counterexample.replay(TopBidBurnPABGA(2))


def test_revenue_bound_audit():
    gta = audit_revenue_bound(GTA(), CheckConfig(n=3, grid_max=3))
    assert gta.holds and gta.details["revenue_equals_count"]
    pabga = audit_revenue_bound(PABGA(1), CheckConfig(n=1, grid_max=3))
    assert pabga.verdict is Verdict.VIOLATED
    assert pabga.counterexample.after > pabga.counterexample.before
    assert pabga.counterexample.replay(PABGA(1))
    single = Counterexample(Property.REV_BOUND, values=(F(3),), bids=(F(3),), real_count=1,
                            allocation=(1,), before=F(1), after=F(3))
    assert single.replay(PABGA(1))
    assert any("DSIC" in n for n in pabga.notes)
    well = audit_revenue_bound(WellReserved(2, reserve=1), CheckConfig(n=3, grid_max=3))
    assert well.details["max_revenue_per_allocated"] <= 3 - 1
    with pytest.raises(ValueError):
        audit_revenue_bound(GTA(), CheckConfig(n=2, grid_max=1, step=F(1, 2)))


# --- search plumbing


def test_budget_and_random_fallback():
    cfg = CheckConfig(n=3, grid_max=3, budget=10, random_trials=50, seed=4)
    report = check_dsic(GTA(), cfg)
    assert report.verdict is Verdict.NO_VIOLATION_FOUND and report.mode == "randomized"
    assert report == check_dsic(GTA(), cfg)
    violated = check_dsic(PABGA(1), replace(cfg, random_trials=500))
    assert violated.verdict is Verdict.VIOLATED and violated.counterexample.replay(PABGA(1))
    with pytest.raises(BudgetExceeded):
        check_dsic(GTA(), replace(cfg, random_trials=None))


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("TFM_LAB_BUDGET", "5")
    with pytest.raises(BudgetExceeded):
        check_oca(GTA(), CheckConfig(n=2, grid_max=2, random_trials=None))


def test_parallel_sweep_matches_sequential():
    cfg = CheckConfig(n=2, grid_max=5, coalition_bound=1)
    assert check_scp(UPGA(1), cfg) == check_scp(UPGA(1), replace(cfg, workers=2))


def test_config_validation():
    with pytest.raises(ValueError):
        CheckConfig(n=0)
    with pytest.raises(ValueError):
        CheckConfig(grid_max=3, step=2)
    with pytest.raises(ValueError):
        CheckConfig(max_fake=-1)
    assert CheckConfig(grid_max=1, step=F(1, 2)).grid == (0, F(1, 2), 1)
    assert run_check("dsic", GTA(), CheckConfig(n=1, grid_max=2)).property is Property.DSIC


# --- cross-theorem consistency on small grids

family = [GTA(), PABGA(1), PABGA(2), UPGA(1), UPGA(2, reserve=1), WellReserved(1, reserve=1),
          WellReserved(2, reserve=1), MyersonUniform(1, scale=2), SupplyLimitedPABGA(2, limit=1)]


@pytest.mark.parametrize("mech", family, ids=str)
def test_scp_for_everyone_implies_oca(mech):
    cfg = CheckConfig(n=2, grid_max=2, max_fake=1)
    if check_scp(mech, cfg).verdict is Verdict.HOLDS_ON_GRID:
        assert check_oca(mech, cfg).verdict is Verdict.HOLDS_ON_GRID


@pytest.mark.parametrize("mech", family, ids=str)
def test_separable_and_revenue_maximising_implies_mmic(mech):
    cfg = CheckConfig(n=2, grid_max=2, max_fake=1)
    if check_separable(mech, cfg).verdict is not Verdict.HOLDS_ON_GRID:
        return
    no_fakes = replace(cfg, max_fake=0)
    if check_mmic(mech, no_fakes).verdict is Verdict.HOLDS_ON_GRID:
        assert check_mmic(mech, cfg).verdict is Verdict.HOLDS_ON_GRID


@pytest.mark.parametrize("mech", family, ids=str)
def test_every_violation_replays(mech):
    cfg = CheckConfig(n=2, grid_max=2, max_fake=1)
    for prop in (Property.EPIR, Property.EPBB, Property.DSIC, Property.MMIC, Property.OCA,
                 Property.SCP, Property.SEPARABLE, Property.OCA_STRUCTURE):
        report = run_check(prop, mech, cfg)
        if report.verdict is Verdict.VIOLATED:
            assert report.counterexample.replay(mech), report.summary()


def test_miner_utility_of_honest_gta_block():
    out = GTA().outcome((F(2), F(0), F(1)))
    assert miner_utility(out, BidProfile((2, 0, 1))) == 2
