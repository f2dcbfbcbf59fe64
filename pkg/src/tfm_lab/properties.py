"""Finite-grid checkers for the TFM desiderata.

Each checker sweeps valuation (or bid) profiles on the grid
``{0, step, ..., grid_max}`` and returns a :class:`PropertyReport`.  A
``HoldsOnGrid`` verdict certifies the grid only; it is not a proof.

Search model
------------
* Users outside the coalition bid truthfully.
* The miner may add up to ``max_fake`` fake bids drawn from the same grid and
  include any feasible subset of bids (see :meth:`Mechanism.feasible`).
* Side payments inside a coalition cancel, so only bid vectors and miner
  allocations are searched.

Because payment and burn rules depend on the bid vector only, the joint
utility of the miner and a coalition is a sum of per-bid weights over the
included bids.  For a fixed bid vector the miner's best block is therefore
the ``capacity`` largest positive weights, which :func:`best_block` computes
exactly.  Tests cross-check it against subset enumeration.

When the number of cases exceeds the budget (``TFM_LAB_BUDGET`` or
``CheckConfig.budget``) the checker switches to a seeded random search and
reports ``NoViolationFound`` instead of ``HoldsOnGrid``.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import partial
from typing import Callable, Iterator, Sequence

import numpy as np

from .core import (
    BidProfile,
    BurnSchedule,
    cap_block,
    joint_utility,
    miner_utility,
    to_amount,
    user_utility,
)
from .mechanisms import Mechanism

DEFAULT_BUDGET = 2_000_000
BUDGET_ENV = "TFM_LAB_BUDGET"
REVENUE_BOUND_CONSTANT = 5


class BudgetExceeded(RuntimeError):
    """Exhaustive search is too large and random fallback is disabled."""


class Property(str, enum.Enum):
    EPIR = "EPIR"
    EPBB = "EPBB"
    DSIC = "DSIC"
    MMIC = "MMIC"
    OCA = "OCA"
    SCP = "SCP"
    SEPARABLE = "SEPARABLE"
    OCA_STRUCTURE = "OCA_STRUCTURE"
    REV_BOUND = "REV_BOUND"

    def __str__(self):
        return self.value


class Verdict(str, enum.Enum):
    HOLDS_ON_GRID = "HoldsOnGrid"
    VIOLATED = "Violated"
    NO_VIOLATION_FOUND = "NoViolationFound"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CheckConfig:
    """Search grid and adversary power.

    ``coalition_bound=None`` means coalitions of any size.
    """

    n: int = 3
    grid_max: Fraction = Fraction(3)
    step: Fraction = Fraction(1)
    max_fake: int = 0
    coalition_bound: int | None = None
    budget: int | None = None
    random_trials: int | None = 20_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "grid_max", to_amount(self.grid_max))
        object.__setattr__(self, "step", to_amount(self.step))
        if self.n < 1:
            raise ValueError("need at least one real bidder")
        if self.step <= 0 or self.grid_max < 0:
            raise ValueError("step must be positive and grid_max non-negative")
        if Fraction(self.grid_max) / Fraction(self.step) % 1:
            raise ValueError("grid_max must be a multiple of step")
        if self.max_fake < 0:
            raise ValueError("max_fake must be >= 0")
        if self.coalition_bound is not None and self.coalition_bound < 0:
            raise ValueError("coalition_bound must be >= 0")

    @property
    def grid(self) -> tuple:
        points = int(Fraction(self.grid_max) / Fraction(self.step))
        return tuple(Fraction(self.step) * j for j in range(points + 1))

    @property
    def max_coalition(self) -> int:
        return self.n if self.coalition_bound is None else min(self.coalition_bound, self.n)

    def resolved_budget(self) -> int:
        if self.budget is not None:
            return self.budget
        env = os.environ.get(BUDGET_ENV)
        return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class Counterexample:
    """Replayable witness of a violation.

    For the utility properties (DSIC, MMIC, OCA, SCP) ``before`` is the
    honest utility and ``after`` the deviating one, with ``after > before``.
    For rule properties ``bids`` / ``other_bids`` are the offending profiles.
    """

    property: Property
    values: tuple = ()
    honest_bids: tuple = ()
    bids: tuple = ()
    real_count: int = 0
    coalition: tuple = ()
    allocation: tuple = ()
    honest_allocation: tuple = ()
    bidder: int | None = None
    other_bids: tuple = ()
    before: Fraction | None = None
    after: Fraction | None = None
    reason: str = ""

    @property
    def fakes(self) -> tuple:
        return self.bids[self.real_count:]

    @property
    def gain(self):
        return None if self.after is None else self.after - self.before

    def describe(self) -> str:
        parts = [self.reason] if self.reason else []
        if self.values:
            parts.append(f"values={_fmt(self.values)}")
        if self.bids:
            real, fakes = self.bids[: self.real_count], self.fakes
            parts.append(f"bids={_fmt(real)}" + (f" fakes={_fmt(fakes)}" if fakes else ""))
        if self.coalition:
            parts.append(f"coalition={list(self.coalition)}")
        if self.allocation:
            parts.append(f"allocation={list(self.allocation)}")
        if self.other_bids:
            parts.append(f"other_bids={_fmt(self.other_bids)}")
        if self.after is not None:
            parts.append(f"utility {self.before} -> {self.after}")
        return "; ".join(parts)

    def replay(self, mech: Mechanism) -> bool:
        """Recompute the witness from scratch; True iff it reproduces exactly."""
        replayer = _REPLAYERS.get(self.property)
        if replayer is None:
            raise ValueError(f"no replay for {self.property}")
        return replayer(self, mech)


@dataclass(frozen=True)
class PropertyReport:
    property: Property
    verdict: Verdict
    mechanism: str
    counterexample: Counterexample | None = None
    cases: int = 0
    mode: str = "exhaustive"
    notes: tuple = ()
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict is Verdict.VIOLATED and self.counterexample is None:
            raise ValueError("a violated report needs a counterexample")

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.VIOLATED

    def __str__(self):
        return f"{self.property}: {self.verdict}"

    def summary(self) -> str:
        lines = [f"{self.property}: {self.verdict}  [{self.mechanism}; {self.mode}, {self.cases} cases]"]
        if self.counterexample is not None:
            lines.append(f"  counterexample: {self.counterexample.describe()}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _fmt(xs) -> str:
    return "[" + ", ".join(str(x) for x in xs) + "]"


# ---------------------------------------------------------------------------
# miner best response


class _Rules:
    """Memoised payment/burn rules of one mechanism."""

    def __init__(self, mech: Mechanism):
        self.mech = mech
        self._cache: dict = {}

    def __call__(self, bids: tuple):
        hit = self._cache.get(bids)
        if hit is None:
            hit = (self.mech.payment_rule(bids), self.mech.burn_rule(bids))
            if len(self._cache) > 200_000:
                self._cache.clear()
            self._cache[bids] = hit
        return hit


def best_block(mech: Mechanism, bids: tuple, real_count: int, values: Sequence = (), coalition=(), rules=None):
    """Best feasible block for the miner plus ``coalition`` given ``bids``.

    Returns ``(utility, allocation)``.  With an empty coalition this is the
    miner's own best response.
    """
    pay, burn = (rules or _Rules(mech))(bids)
    members = set(coalition)
    weights = []
    for i, b in enumerate(bids):
        if pay[i] > b:
            continue
        if i >= real_count:
            w = -burn[i]
        elif i in members:
            w = values[i] - burn[i]
        else:
            w = pay[i] - burn[i]
        if w > 0:
            weights.append((-w, i))
    weights.sort()
    slots = cap_block(mech.capacity, len(bids))
    alloc = [0] * len(bids)
    total = Fraction(0)
    for negw, i in weights[:slots]:
        alloc[i] = 1
        total -= negw
    return total, tuple(alloc)


def brute_force_block(mech: Mechanism, bids: tuple, real_count: int, values: Sequence = (), coalition=()):
    """Subset enumeration version of :func:`best_block` (slow; for testing)."""
    profile = BidProfile(bids, real_count)
    best, best_alloc = None, None
    slots = cap_block(mech.capacity, len(bids))
    vals = tuple(values) + (0,) * (len(bids) - len(values))
    for size in range(slots + 1):
        for chosen in itertools.combinations(range(len(bids)), size):
            alloc = tuple(1 if i in chosen else 0 for i in range(len(bids)))
            if not mech.feasible(bids, alloc):
                continue
            u = joint_utility(mech.outcome(bids, alloc), coalition, vals[:real_count], profile)
            if best is None or u > best:
                best, best_alloc = u, alloc
    return best, best_alloc


# ---------------------------------------------------------------------------
# case enumeration


def _fake_sets(cfg: CheckConfig) -> list:
    grid = cfg.grid
    out = []
    for f in range(cfg.max_fake + 1):
        out.extend(itertools.combinations_with_replacement(grid, f))
    return out


def _coalitions(n: int, sizes) -> list:
    return [c for s in sizes for c in itertools.combinations(range(n), s)]


class _Inner:
    """Inner search space for one valuation profile: exhaustive or sampled."""

    def __init__(self, rng: np.random.Generator | None):
        self.rng = rng

    def pick(self, options: Sequence):
        if self.rng is None:
            return options
        return [options[int(self.rng.integers(len(options)))]]

    def product(self, grid: Sequence, r: int):
        if self.rng is None:
            return itertools.product(grid, repeat=r)
        return [tuple(grid[int(j)] for j in self.rng.integers(len(grid), size=r))]


def _profiles(cfg: CheckConfig, n: int | None = None) -> Iterator[tuple]:
    return itertools.product(cfg.grid, repeat=cfg.n if n is None else n)


def _sample_profile(cfg: CheckConfig, rng) -> tuple:
    grid = cfg.grid
    return tuple(grid[int(j)] for j in rng.integers(len(grid), size=cfg.n))


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _run_search(
    prop: Property,
    mech: Mechanism,
    cfg: CheckConfig,
    per_profile: Callable,
    inner_size: int,
    notes=(),
) -> PropertyReport:
    """Drive ``per_profile(mech, cfg, profile, inner) -> (cases, cex)`` over the grid."""
    n_profiles = len(cfg.grid) ** cfg.n
    total = n_profiles * inner_size
    budget = cfg.resolved_budget()
    cases = 0
    if total <= budget:
        mode = "exhaustive"
        work = partial(per_profile, mech, cfg, inner=_Inner(None))
        if cfg.workers > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                # map preserves profile order, so the first violation is the
                # same one a sequential sweep would report
                for count, cex in pool.map(work, _profiles(cfg), chunksize=max(1, n_profiles // (8 * cfg.workers))):
                    cases += count
                    if cex is not None:
                        break
        else:
            cex = None
            for profile in _profiles(cfg):
                count, cex = work(profile)
                cases += count
                if cex is not None:
                    break
    else:
        if not cfg.random_trials:
            raise BudgetExceeded(f"{prop} on {mech}: {total} cases exceed the budget of {budget}")
        mode = "randomized"
        cex = None
        for t in range(cfg.random_trials):
            rng = _rng(cfg.seed, t)
            count, cex = per_profile(mech, cfg, _sample_profile(cfg, rng), inner=_Inner(rng))
            cases += count
            if cex is not None:
                break
        notes = tuple(notes) + (f"{total} cases exceed budget {budget}; sampled {cfg.random_trials} trials with seed {cfg.seed}",)
    if cex is not None:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.HOLDS_ON_GRID if mode == "exhaustive" else Verdict.NO_VIOLATION_FOUND
    return PropertyReport(prop, verdict, str(mech), cex, cases, mode, tuple(notes))


# ---------------------------------------------------------------------------
# EPIR / EPBB


def _epir_profile(mech, cfg, bids, inner):
    out = mech.outcome(bids)
    for i, (a, p) in enumerate(zip(out.allocated, out.payments)):
        if (not a and p != 0) or (a and p > bids[i]):
            why = "unallocated bid pays" if not a else "payment exceeds bid"
            return 1, Counterexample(Property.EPIR, bids=bids, real_count=len(bids), bidder=i,
                                     allocation=out.allocated, reason=f"{why}: bid {i} pays {p}")
    return 1, None


def _epbb_profile(mech, cfg, bids, inner):
    out = mech.outcome(bids)
    for i, (p, q) in enumerate(zip(out.payments, out.burns)):
        if q > p:
            return 1, Counterexample(Property.EPBB, bids=bids, real_count=len(bids), bidder=i,
                                     allocation=out.allocated, reason=f"bid {i} burns {q} > payment {p}")
    return 1, None


def check_epir(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    return _run_search(Property.EPIR, mech, cfg, _epir_profile, 1)


def check_epbb(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    return _run_search(Property.EPBB, mech, cfg, _epbb_profile, 1)


# ---------------------------------------------------------------------------
# DSIC


def _dsic_profile(mech, cfg, values, inner):
    honest = mech.outcome(values)
    cases = 0
    for i in inner.pick(range(cfg.n)):
        truthful = user_utility(honest, values[i], i)
        for b in inner.pick(cfg.grid):
            cases += 1
            if b == values[i]:
                continue
            bids = values[:i] + (b,) + values[i + 1:]
            dev = mech.outcome(bids)
            u = user_utility(dev, values[i], i)
            if u > truthful:
                return cases, Counterexample(
                    Property.DSIC, values=values, honest_bids=values, bids=bids, real_count=cfg.n,
                    bidder=i, allocation=dev.allocated, honest_allocation=honest.allocated,
                    before=truthful, after=u, reason=f"bidder {i} gains by bidding {b} instead of {values[i]}",
                )
    return cases, None


def check_dsic(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    return _run_search(Property.DSIC, mech, cfg, _dsic_profile, cfg.n * len(cfg.grid))


# ---------------------------------------------------------------------------
# MMIC


def _mmic_profile(mech, cfg, values, inner, rules=None):
    rules = rules or _Rules(mech)
    honest = mech.outcome(values)
    honest_u = miner_utility(honest, BidProfile(values))
    cases = 0
    for fakes in inner.pick(_fake_sets(cfg)):
        cases += 1
        bids = values + tuple(fakes)
        u, alloc = best_block(mech, bids, cfg.n, rules=rules)
        if u > honest_u:
            return cases, Counterexample(
                Property.MMIC, values=values, honest_bids=values, bids=bids, real_count=cfg.n,
                allocation=alloc, honest_allocation=honest.allocated, before=honest_u, after=u,
                reason="miner gains " + ("with fake bids" if fakes else "by deviating from the intended allocation"),
            )
    return cases, None


def check_mmic(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    return _run_search(Property.MMIC, mech, cfg, _mmic_profile, len(_fake_sets(cfg)))


# ---------------------------------------------------------------------------
# OCA and SCP


def _collusion_profile(prop, sizes, mech, cfg, values, inner):
    honest = mech.outcome(values)
    honest_profile = BidProfile(values)
    if prop is Property.OCA:
        winners = tuple(i for i in range(cfg.n) if honest.allocated[i])
        baseline = joint_utility(honest, winners, values, honest_profile)
    rules = _Rules(mech)
    fake_sets = _fake_sets(cfg)
    cases = 0
    for coalition in inner.pick(_coalitions(cfg.n, sizes)):
        if prop is Property.SCP:
            baseline = joint_utility(honest, coalition, values, honest_profile)
        for fakes in inner.pick(fake_sets):
            for dev in inner.product(cfg.grid, len(coalition)):
                cases += 1
                real = list(values)
                for i, b in zip(coalition, dev):
                    real[i] = b
                bids = tuple(real) + tuple(fakes)
                u, alloc = best_block(mech, bids, cfg.n, values, coalition, rules)
                if u > baseline:
                    return cases, Counterexample(
                        prop, values=values, honest_bids=values, bids=bids, real_count=cfg.n,
                        coalition=coalition, allocation=alloc, honest_allocation=honest.allocated,
                        before=baseline, after=u,
                        reason=f"miner and bidders {list(coalition)} raise joint utility",
                    )
    return cases, None


def _collusion_size(cfg: CheckConfig, sizes) -> int:
    g = len(cfg.grid)
    return sum(math.comb(cfg.n, s) * g**s for s in sizes) * len(_fake_sets(cfg))


_TRUTHFUL_NOTE = "honest baseline is truthful bidding; users outside the coalition bid truthfully"


def check_oca(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    sizes = range(0, cfg.max_coalition + 1)
    return _run_search(
        Property.OCA, mech, cfg, partial(_collusion_profile, Property.OCA, sizes),
        _collusion_size(cfg, sizes), notes=(_TRUTHFUL_NOTE,),
    )


def check_scp(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    sizes = range(1, cfg.max_coalition + 1)
    return _run_search(
        Property.SCP, mech, cfg, partial(_collusion_profile, Property.SCP, sizes),
        _collusion_size(cfg, sizes), notes=(_TRUTHFUL_NOTE,),
    )


# ---------------------------------------------------------------------------
# sweeps that aggregate over all profiles


def _profile_stream(cfg: CheckConfig, n_items: int, label: str):
    """Profiles for the aggregating checks, plus mode and notes."""
    total = len(cfg.grid) ** cfg.n * n_items
    budget = cfg.resolved_budget()
    if total <= budget:
        return _profiles(cfg), "exhaustive", ()
    if not cfg.random_trials:
        raise BudgetExceeded(f"{label}: {total} cases exceed the budget of {budget}")
    stream = (_sample_profile(cfg, _rng(cfg.seed, t)) for t in range(cfg.random_trials))
    return stream, "randomized", (f"{total} cases exceed budget {budget}; sampled {cfg.random_trials} profiles",)


def _clean_verdict(mode):
    return Verdict.HOLDS_ON_GRID if mode == "exhaustive" else Verdict.NO_VIOLATION_FOUND


def check_separable(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    """Payment and burn of bid i may depend only on b_i and i's allocation status.

    Bid vectors of every length from ``n`` to ``n + max_fake`` are swept,
    since the rules must also be separable on vectors padded with fakes.
    """
    lengths = range(cfg.n, cfg.n + cfg.max_fake + 1)
    g = len(cfg.grid)
    total = sum(g**length for length in lengths)
    budget = cfg.resolved_budget()
    if total <= budget:
        mode, notes = "exhaustive", ()
        profiles = itertools.chain.from_iterable(_profiles(cfg, length) for length in lengths)
    elif cfg.random_trials:
        mode = "randomized"
        notes = (f"{total} cases exceed budget {budget}; sampled {cfg.random_trials} profiles",)

        def sampled():
            for t in range(cfg.random_trials):
                rng = _rng(cfg.seed, t)
                length = cfg.n + int(rng.integers(cfg.max_fake + 1))
                yield tuple(cfg.grid[int(j)] for j in rng.integers(g, size=length))

        profiles = sampled()
    else:
        raise BudgetExceeded(f"SEPARABLE: {total} cases exceed the budget of {budget}")
    seen: dict = {}
    cases = 0
    for bids in profiles:
        cases += 1
        out = mech.outcome(bids)
        for i in range(len(bids)):
            key = (i, bids[i], out.allocated[i])
            got = (out.payments[i], out.burns[i])
            first = seen.setdefault(key, (got, bids))
            if first[0] != got:
                cex = Counterexample(
                    Property.SEPARABLE, bids=bids, other_bids=first[1], real_count=len(bids), bidder=i,
                    allocation=out.allocated,
                    reason=(f"bid {i}={bids[i]} pays/burns {_fmt(got)} here but {_fmt(first[0])} "
                            f"against other bids with the same allocation status"),
                )
                return PropertyReport(Property.SEPARABLE, Verdict.VIOLATED, str(mech), cex, cases, mode, notes)
    return PropertyReport(Property.SEPARABLE, _clean_verdict(mode), str(mech), None, cases, mode, notes)


def validate_oca_structure(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    """Check the size-based-burn / top-k / argmax form of OCA-proof mechanisms.

    (a) total burn depends only on the allocated count and is non-decreasing;
    (b) the allocated bids are the highest ones;
    (c) the allocated count maximises sum(top-k bids) - cardinal(k) over
        0 <= k <= the largest count ever observed.

    Counts never observed get the smallest value consistent with (a).
    """
    profiles, mode, notes = _profile_stream(cfg, 1, "OCA_STRUCTURE")
    profiles = list(profiles)
    name = str(mech)
    outcomes = [(bids, mech.outcome(bids)) for bids in profiles]

    def violated(reason, bids, other=(), alloc=()):
        cex = Counterexample(Property.OCA_STRUCTURE, bids=bids, other_bids=other, real_count=cfg.n,
                             allocation=alloc, reason=reason)
        return PropertyReport(Property.OCA_STRUCTURE, Verdict.VIOLATED, name, cex, len(outcomes), mode, notes)

    # (a)
    burn_at: dict = {}
    for bids, out in outcomes:
        k, total = out.n_allocated, out.total_burn
        first = burn_at.setdefault(k, (total, bids))
        if first[0] != total:
            return violated(f"(a) {k} allocated bids burn {total} here but {first[0]} elsewhere",
                            bids, first[1], out.allocated)
    observed = sorted(burn_at)
    for lo, hi in zip(observed, observed[1:]):
        if burn_at[hi][0] < burn_at[lo][0]:
            return violated(f"(a) burn drops from {burn_at[lo][0]} at {lo} bids to {burn_at[hi][0]} at {hi}",
                            burn_at[hi][1], burn_at[lo][1])
    top = observed[-1]
    cardinal, inferred, running = [], [], Fraction(0)
    for k in range(top + 1):
        if k in burn_at:
            running = max(running, burn_at[k][0])
        else:
            inferred.append(k)
        cardinal.append(running)
    schedule = BurnSchedule(tuple(cardinal))

    for bids, out in outcomes:
        won = [bids[i] for i in range(cfg.n) if out.allocated[i]]
        lost = [bids[i] for i in range(cfg.n) if not out.allocated[i]]
        # (b)
        if won and lost and min(won) < max(lost):
            return violated(f"(b) allocated bid {min(won)} below unallocated bid {max(lost)}", bids, alloc=out.allocated)
        # (c)
        ordered = sorted(bids, reverse=True)
        prefix = [Fraction(0)]
        for b in ordered[:top]:
            prefix.append(prefix[-1] + b)
        scores = [prefix[k] - schedule(k) for k in range(min(top, len(bids)) + 1)]
        realised = out.n_allocated
        if scores[realised] != max(scores):
            best = scores.index(max(scores))
            return violated(f"(c) allocates {realised} bids scoring {scores[realised]}, "
                            f"but {best} bids score {scores[best]}", bids, alloc=out.allocated)

    details = {"cardinal": schedule, "inferred_counts": tuple(inferred), "capacity": top}
    notes = tuple(notes) + (f"cardinal burn {_fmt(schedule.cardinal)} for 0..{top} allocated bids",)
    return PropertyReport(Property.OCA_STRUCTURE, _clean_verdict(mode), name, None, len(outcomes), mode, notes, details)


def audit_revenue_bound(mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    """Check miner revenue <= 5 per allocated bid, and <= 1 per bid when separable.

    The bounds are only theorems for EPIR, EPBB, DSIC and 1-SCP mechanisms;
    the report lists which of those hypotheses hold on the same grid so a
    violation can be attributed.
    """
    if cfg.step != 1:
        raise ValueError("revenue bound audit needs unit bid steps")
    hyp_cfg = replace(cfg, coalition_bound=1)
    hypotheses = {
        p: fn(mech, hyp_cfg).verdict
        for p, fn in ((Property.EPIR, check_epir), (Property.EPBB, check_epbb),
                      (Property.DSIC, check_dsic), (Property.SCP, check_scp))
    }
    separable = check_separable(mech, cfg).verdict
    hypotheses[Property.SEPARABLE] = separable
    applies = all(v is not Verdict.VIOLATED for p, v in hypotheses.items() if p is not Property.SEPARABLE)
    tight = separable is not Verdict.VIOLATED

    profiles, mode, notes = _profile_stream(cfg, 1, "REV_BOUND")
    cases = 0
    equal_everywhere = True
    worst_ratio = None
    cex = None
    for values in profiles:
        cases += 1
        out = mech.outcome(values)
        revenue = miner_utility(out, BidProfile(values))
        k = out.n_allocated
        equal_everywhere &= revenue == k
        if k:
            ratio = Fraction(revenue) / k
            worst_ratio = ratio if worst_ratio is None else max(worst_ratio, ratio)
        bound, label = (k, "revenue <= allocated count") if tight else (REVENUE_BOUND_CONSTANT * k, "revenue <= 5 * allocated count")
        if revenue > REVENUE_BOUND_CONSTANT * k:
            label, bound = "revenue <= 5 * allocated count", REVENUE_BOUND_CONSTANT * k
        if revenue > bound and cex is None:
            cex = Counterexample(Property.REV_BOUND, values=values, bids=values, real_count=cfg.n,
                                 allocation=out.allocated, before=Fraction(bound), after=Fraction(revenue),
                                 reason=f"{label} fails: revenue {revenue} with {k} allocated")
    failing = [str(p) for p, v in hypotheses.items() if v is Verdict.VIOLATED and p is not Property.SEPARABLE]
    notes = list(notes)
    notes.append("hypotheses: " + ", ".join(f"{p}={v}" for p, v in hypotheses.items()))
    if cex is not None and failing:
        notes.append(f"bound not implied: mechanism fails {', '.join(failing)}")
    details = {
        "hypotheses": hypotheses,
        "theorem_applies": applies,
        "separable_bound_asserted": tight,
        "revenue_equals_count": equal_everywhere,
        "max_revenue_per_allocated": worst_ratio,
    }
    verdict = Verdict.VIOLATED if cex is not None else _clean_verdict(mode)
    return PropertyReport(Property.REV_BOUND, verdict, str(mech), cex, cases, mode, tuple(notes), details)


# ---------------------------------------------------------------------------
# replay


def _replay_dsic(c: Counterexample, mech: Mechanism) -> bool:
    i = c.bidder
    before = user_utility(mech.outcome(c.values), c.values[i], i)
    after = user_utility(mech.outcome(c.bids), c.values[i], i)
    return before == c.before and after == c.after and after > before


def _replay_mmic(c: Counterexample, mech: Mechanism) -> bool:
    before = miner_utility(mech.outcome(c.values), BidProfile(c.values))
    if not mech.feasible(c.bids, c.allocation):
        return False
    after = miner_utility(mech.outcome(c.bids, c.allocation), BidProfile(c.bids, c.real_count))
    return before == c.before and after == c.after and after > before


def _replay_collusion(c: Counterexample, mech: Mechanism) -> bool:
    honest = mech.outcome(c.values)
    profile = BidProfile(c.values)
    if c.property is Property.OCA:
        winners = [i for i in range(len(c.values)) if honest.allocated[i]]
        before = joint_utility(honest, winners, c.values, profile)
    else:
        before = joint_utility(honest, c.coalition, c.values, profile)
    if not mech.feasible(c.bids, c.allocation):
        return False
    after = joint_utility(mech.outcome(c.bids, c.allocation), c.coalition, c.values, BidProfile(c.bids, c.real_count))
    return before == c.before and after == c.after and after > before


def _replay_epir(c: Counterexample, mech: Mechanism) -> bool:
    out = mech.outcome(c.bids)
    i = c.bidder
    return (not out.allocated[i] and out.payments[i] != 0) or (out.allocated[i] and out.payments[i] > c.bids[i])


def _replay_epbb(c: Counterexample, mech: Mechanism) -> bool:
    out = mech.outcome(c.bids)
    return out.burns[c.bidder] > out.payments[c.bidder]


def _replay_separable(c: Counterexample, mech: Mechanism) -> bool:
    i = c.bidder
    a, b = mech.outcome(c.bids), mech.outcome(c.other_bids)
    return (c.bids[i] == c.other_bids[i] and a.allocated[i] == b.allocated[i]
            and (a.payments[i], a.burns[i]) != (b.payments[i], b.burns[i]))


def _replay_structure(c: Counterexample, mech: Mechanism) -> bool:
    out = mech.outcome(c.bids)
    if c.reason.startswith("(a)") and c.other_bids:
        other = mech.outcome(c.other_bids)
        if out.n_allocated == other.n_allocated:
            return out.total_burn != other.total_burn
        return (out.n_allocated > other.n_allocated) == (out.total_burn < other.total_burn)
    if c.reason.startswith("(b)"):
        won = [b for b, a in zip(c.bids, out.allocated) if a]
        lost = [b for b, a in zip(c.bids, out.allocated) if not a]
        return bool(won and lost and min(won) < max(lost))
    return out.allocated == c.allocation


def _replay_revenue(c: Counterexample, mech: Mechanism) -> bool:
    out = mech.outcome(c.values)
    return miner_utility(out, BidProfile(c.values)) == c.after and c.after > c.before


_REPLAYERS = {
    Property.DSIC: _replay_dsic,
    Property.MMIC: _replay_mmic,
    Property.OCA: _replay_collusion,
    Property.SCP: _replay_collusion,
    Property.EPIR: _replay_epir,
    Property.EPBB: _replay_epbb,
    Property.SEPARABLE: _replay_separable,
    Property.OCA_STRUCTURE: _replay_structure,
    Property.REV_BOUND: _replay_revenue,
}

CHECKERS = {
    Property.EPIR: check_epir,
    Property.EPBB: check_epbb,
    Property.DSIC: check_dsic,
    Property.MMIC: check_mmic,
    Property.OCA: check_oca,
    Property.SCP: check_scp,
    Property.SEPARABLE: check_separable,
    Property.OCA_STRUCTURE: validate_oca_structure,
    Property.REV_BOUND: audit_revenue_bound,
}


def run_check(prop: Property | str, mech: Mechanism, cfg: CheckConfig) -> PropertyReport:
    return CHECKERS[Property(str(prop).upper())](mech, cfg)
