"""Concrete transaction fee mechanisms.

Every mechanism follows the same shape: an intended allocation rule, plus a
payment rule and a burn rule that map the full bid vector to what each bid
would pay / burn *if* allocated.  Unallocated bids pay and burn nothing.
Keeping the rules functions of the bids alone (not of which bids the miner
includes) is what lets the property checkers evaluate arbitrary miner
allocations cheaply.

A miner may include a bid only when its payment does not exceed the bid
(a transaction cannot be charged above its fee cap) and at most
``capacity`` bids fit.  See :meth:`Mechanism.feasible`.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    INFINITE,
    BidProfile,
    GridError,
    Outcome,
    ValuationProfile,
    cap_block,
    check_block_size,
    on_grid,
    to_amount,
    top_k_allocation,
)
from .equilibrium import MAX_VERIFIED_K, UnverifiedRange, shade_bid_uniform

ZERO = Fraction(0)


def kth_highest(bids: Sequence, k: int):
    """k-th highest bid (1-based), or 0 when there are fewer than k bids."""
    if k == INFINITE or k > len(bids):
        return ZERO
    return sorted(bids, reverse=True)[k - 1]


class Mechanism(ABC):
    """Base class.  Subclasses set ``name``, ``block_size``, ``reserve`` and ``step``."""

    name: str = "mechanism"
    block_size = INFINITE
    reserve = ZERO
    step = None  # None: continuous bid space

    @property
    def capacity(self):
        """Most bids that can ever be allocated (may be below the block size)."""
        return self.block_size

    def allocate(self, bids: Sequence) -> tuple:
        return top_k_allocation(bids, self.capacity, self.reserve)

    @abstractmethod
    def payment_rule(self, bids: Sequence) -> tuple:
        """Payment of each bid if it is allocated."""

    def burn_rule(self, bids: Sequence) -> tuple:
        return (ZERO,) * len(bids)

    def outcome(self, bids: Sequence, allocation: Sequence | None = None) -> Outcome:
        bids = tuple(bids)
        if allocation is None:
            allocation = self.allocate(bids)
        pay = self.payment_rule(bids)
        burn = self.burn_rule(bids)
        return Outcome(
            allocation,
            tuple(p if a else ZERO for a, p in zip(allocation, pay)),
            tuple(q if a else ZERO for a, q in zip(allocation, burn)),
        )

    def feasible(self, bids: Sequence, allocation: Sequence) -> bool:
        """Could a miner actually produce this block?"""
        if cap_block(self.capacity, len(bids)) < sum(allocation):
            return False
        pay = self.payment_rule(bids)
        return all(pay[i] <= bids[i] for i, a in enumerate(allocation) if a)

    def check_bids(self, bids: Sequence) -> None:
        for b in bids:
            if b < 0:
                raise ValueError(f"negative bid {b}")
            if not on_grid(b, self.step):
                raise GridError(f"{self.name}: bid {b} is not a multiple of the step {self.step}")

    def run(self, profile: BidProfile | Sequence) -> Outcome:
        bids = profile.bids if isinstance(profile, BidProfile) else tuple(to_amount(b) for b in profile)
        self.check_bids(bids)
        return self.outcome(bids).validate(self.block_size, bids)

    def __str__(self):
        return self.name


def _grid_step(step):
    return None if step is None else to_amount(step)


@dataclass(frozen=True)
class GTA(Mechanism):
    """Discrete posted price 1 with unbounded blocks; every bid >= 1 pays 1."""

    name = "GTA"
    block_size = INFINITE
    reserve = Fraction(1)
    step = Fraction(1)

    def payment_rule(self, bids):
        return (Fraction(1),) * len(bids)


@dataclass(frozen=True)
class PABGA(Mechanism):
    """Pay-as-bid: the top ``block_size`` bids pay their own bids."""

    block_size: int = 1
    step: Fraction | None = None

    def __post_init__(self):
        check_block_size(self.block_size)
        object.__setattr__(self, "step", _grid_step(self.step))

    @property
    def name(self):
        return f"PABGA(k={self.block_size})"

    def payment_rule(self, bids):
        return tuple(bids)


@dataclass(frozen=True)
class UPGA(Mechanism):
    """Uniform price: the top ``block_size`` bids >= reserve each pay
    max(reserve, (k+1)-th highest bid)."""

    block_size: int = 1
    reserve: Fraction = ZERO
    step: Fraction | None = None

    def __post_init__(self):
        check_block_size(self.block_size)
        object.__setattr__(self, "reserve", to_amount(self.reserve))
        object.__setattr__(self, "step", _grid_step(self.step))
        if self.reserve < 0:
            raise ValueError("reserve must be non-negative")

    @property
    def name(self):
        return f"UPGA(k={self.block_size}, r={self.reserve})"

    def price(self, bids):
        return max(self.reserve, kth_highest(bids, self.block_size + 1))

    def payment_rule(self, bids):
        return (self.price(bids),) * len(bids)


@dataclass(frozen=True)
class WellReserved(UPGA):
    """UPGA-priced, burning the reserve for every allocated bid."""

    @property
    def name(self):
        return f"WellReserved(k={self.block_size}, r={self.reserve})"

    def burn_rule(self, bids):
        return (self.reserve,) * len(bids)


@dataclass(frozen=True)
class MyersonUniform(UPGA):
    """Revenue-optimal auction for UNI([0, scale]) values.

    Virtual value 2v - scale is non-negative from scale/2 on, so this is a
    UPGA with reserve scale/2.  Nothing is burnt.
    """

    scale: Fraction = Fraction(1)

    def __post_init__(self):
        scale = to_amount(self.scale)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "reserve", scale / 2)
        super().__post_init__()

    @property
    def name(self):
        return f"MyersonUniform(k={self.block_size}, r={self.reserve})"


@dataclass(frozen=True)
class SupplyLimitedPABGA(PABGA):
    """PABGA that never fills more than ``limit`` of its ``block_size`` slots.

    Equivalent to an infinite burn on the (limit+1)-th allocated bid, so the
    miner cannot exceed the limit either.
    """

    limit: int = 1

    def __post_init__(self):
        super().__post_init__()
        if not 1 <= self.limit <= self.block_size:
            raise ValueError(f"limit {self.limit} must be in [1, {self.block_size}]")

    @property
    def name(self):
        return f"SupplyLimitedPABGA(k={self.block_size}, limit={self.limit})"

    @property
    def capacity(self):
        return self.limit


@dataclass(frozen=True)
class Shading(Mechanism):
    """Direct revelation of the uniform PABGA equilibrium.

    Bids are reported values in [0, 1]; each of the top k pays s(v).  The
    auctioneer is told ``n`` (the bid function depends on it).
    """

    n: int = 2
    block_size: int = 1

    def __post_init__(self):
        check_block_size(self.block_size)
        if self.block_size > MAX_VERIFIED_K:
            raise UnverifiedRange(f"shading auction needs k <= {MAX_VERIFIED_K}, got {self.block_size}")
        if self.n <= self.block_size:
            raise ValueError(f"shading auction needs n > k, got n={self.n}, k={self.block_size}")

    @property
    def name(self):
        return f"Shading(n={self.n}, k={self.block_size})"

    def payment_rule(self, bids):
        return tuple(shade_bid_uniform(self.n, self.block_size, b) for b in bids)

    def check_bids(self, bids):
        super().check_bids(bids)
        if any(b > 1 for b in bids):
            raise ValueError("shading auction values must lie in [0, 1]")


@dataclass(frozen=True)
class TopBidBurnPABGA(PABGA):
    """Negative control: pay-as-bid where the highest bid burns its whole payment.

    Total burn then tracks the top bid value rather than the number of
    allocated bids, which no OCA-proof mechanism can do.
    """

    @property
    def name(self):
        return f"TopBidBurnPABGA(k={self.block_size})"

    def burn_rule(self, bids):
        if not bids:
            return ()
        top = min(range(len(bids)), key=lambda i: (-bids[i], i))
        return tuple(b if i == top else ZERO for i, b in enumerate(bids))


MechanismSpec = Mechanism


def run_mechanism(spec: Mechanism, profile: BidProfile | Sequence) -> Outcome:
    return spec.run(profile)


def shading_outcome(values: ValuationProfile | Sequence, n: int, k: int) -> Outcome:
    vals = values.values if isinstance(values, ValuationProfile) else tuple(values)
    if len(vals) != n:
        raise ValueError(f"expected {n} values, got {len(vals)}")
    return Shading(n=n, block_size=k).run(vals)


VARIANTS = {
    "GTA": GTA,
    "PABGA": PABGA,
    "UPGA": UPGA,
    "WELLRESERVED": WellReserved,
    "MYERSONUNIFORM": MyersonUniform,
    "SUPPLYLIMITEDPABGA": SupplyLimitedPABGA,
    "SHADING": Shading,
    "TOPBIDBURNPABGA": TopBidBurnPABGA,
}


def make_mechanism(variant: str, *, block_size=None, reserve=None, limit=None, step=None, n=None, scale=None) -> Mechanism:
    """Build a mechanism from loose keyword fields (used by the CLI)."""
    key = variant.replace("_", "").replace("-", "").upper()
    if key not in VARIANTS:
        raise KeyError(f"unknown mechanism variant {variant!r}; expected one of {sorted(VARIANTS)}")
    cls = VARIANTS[key]
    if cls is GTA:
        return GTA()
    kwargs = {}
    if block_size is not None:
        kwargs["block_size"] = block_size
    if cls is Shading:
        if n is not None:
            kwargs["n"] = n
        return cls(**kwargs)
    if step is not None:
        kwargs["step"] = step
    if cls in (UPGA, WellReserved) and reserve is not None:
        kwargs["reserve"] = reserve
    if cls is MyersonUniform and scale is not None:
        kwargs["scale"] = scale
    if cls is SupplyLimitedPABGA and limit is not None:
        kwargs["limit"] = limit
    return cls(**kwargs)
