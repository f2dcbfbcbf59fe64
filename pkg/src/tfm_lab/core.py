"""Domain types and utility functions shared by every other module.

Amounts are kept as :class:`fractions.Fraction` wherever a discrete grid is
involved so that counterexamples replay exactly.  Floats are accepted too
(Monte-Carlo and equilibrium numerics pass them through unchanged).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

INFINITE = math.inf
"""Symbolic unbounded block size.  Capped at the profile length when used."""


class GridError(ValueError):
    """A bid or value does not lie on the mechanism's discrete bid grid."""


def to_amount(x) -> Real:
    """Coerce ``x`` to an exact amount when that can be done losslessly.

    ints, Fractions and numeric strings (``"1/2"``, ``"0.25"``) become
    Fractions; floats are left alone.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not amounts")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, Real):
        return float(x)
    raise TypeError(f"not a numeric amount: {x!r}")


def on_grid(x, step) -> bool:
    if step is None:
        return True
    q = Fraction(x) / Fraction(step)
    return q.denominator == 1


def check_block_size(block) -> None:
    if block == INFINITE:
        return
    if isinstance(block, bool) or not isinstance(block, int) or block < 1:
        raise ValueError(f"block size must be a positive integer or INFINITE, got {block!r}")


def cap_block(block, n: int) -> int:
    """Effective number of slots for ``n`` bids."""
    return n if block == INFINITE else min(int(block), n)


@dataclass(frozen=True)
class BidProfile:
    """Bids as seen by the mechanism.

    The first ``real_count`` entries belong to real users; anything after
    that was injected by the miner.
    """

    bids: tuple
    real_count: int | None = None

    def __post_init__(self):
        bids = tuple(to_amount(b) for b in self.bids)
        object.__setattr__(self, "bids", bids)
        if self.real_count is None:
            object.__setattr__(self, "real_count", len(bids))
        if not 0 <= self.real_count <= len(bids):
            raise ValueError(f"real_count {self.real_count} outside [0, {len(bids)}]")
        for b in bids:
            if b < 0:
                raise ValueError(f"negative bid {b}")

    def __len__(self):
        return len(self.bids)

    @property
    def real(self) -> tuple:
        return self.bids[: self.real_count]

    @property
    def fakes(self) -> tuple:
        return self.bids[self.real_count:]

    @classmethod
    def with_fakes(cls, real: Iterable, fakes: Iterable = ()) -> "BidProfile":
        real = tuple(real)
        return cls(real + tuple(fakes), len(real))


@dataclass(frozen=True)
class ValuationProfile:
    values: tuple

    def __post_init__(self):
        values = tuple(to_amount(v) for v in self.values)
        object.__setattr__(self, "values", values)
        for v in values:
            if v < 0:
                raise ValueError(f"negative value {v}")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class Outcome:
    """Allocation, payment and burn per bid for one auction round.

    Construction only checks shape.  EPIR / EPBB / capacity are checked by
    :meth:`validate`, which every built-in mechanism calls; the property
    checkers instead inspect :meth:`violations` so that deliberately broken
    mechanisms can still be analysed.
    """

    allocated: tuple
    payments: tuple
    burns: tuple

    def __post_init__(self):
        object.__setattr__(self, "allocated", tuple(int(a) for a in self.allocated))
        object.__setattr__(self, "payments", tuple(self.payments))
        object.__setattr__(self, "burns", tuple(self.burns))
        if not len(self.allocated) == len(self.payments) == len(self.burns):
            raise ValueError("allocated, payments and burns must have equal length")
        if any(a not in (0, 1) for a in self.allocated):
            raise ValueError("allocation entries must be 0 or 1")

    def __len__(self):
        return len(self.allocated)

    @property
    def n_allocated(self) -> int:
        return sum(self.allocated)

    @property
    def total_burn(self):
        return sum(self.burns, Fraction(0))

    def violations(self, block=INFINITE, bids: Sequence | None = None) -> list[str]:
        out = []
        for i, (a, p, q) in enumerate(zip(self.allocated, self.payments, self.burns)):
            if p < 0 or q < 0:
                out.append(f"bid {i}: negative payment or burn")
            if not a and p != 0:
                out.append(f"bid {i}: unallocated but pays {p}")
            if bids is not None and a and p > bids[i]:
                out.append(f"bid {i}: pays {p} above its bid {bids[i]}")
            if q > p:
                out.append(f"bid {i}: burn {q} exceeds payment {p}")
        if block != INFINITE and self.n_allocated > block:
            out.append(f"{self.n_allocated} bids allocated with block size {block}")
        return out

    def validate(self, block=INFINITE, bids: Sequence | None = None) -> "Outcome":
        problems = self.violations(block, bids)
        if problems:
            raise AssertionError("; ".join(problems))
        return self


@dataclass(frozen=True)
class BurnSchedule:
    """Total burn as a function of the number of allocated bids."""

    cardinal: tuple = field(default=(Fraction(0),))

    def __post_init__(self):
        cardinal = tuple(to_amount(c) for c in self.cardinal)
        object.__setattr__(self, "cardinal", cardinal)
        if not cardinal or cardinal[0] != 0:
            raise ValueError("cardinal(0) must be 0")
        for a, b in zip(cardinal, cardinal[1:]):
            if b < a:
                raise ValueError("cardinal burn must be non-decreasing in the allocated count")

    @classmethod
    def linear(cls, per_bid, up_to: int) -> "BurnSchedule":
        per_bid = to_amount(per_bid)
        return cls(tuple(per_bid * j for j in range(up_to + 1)))

    def __call__(self, k: int):
        return self.cardinal[k]

    def __len__(self):
        return len(self.cardinal)

    def diff(self, k: int):
        """Marginal burn of the k-th allocated bid, k >= 1."""
        if k < 1:
            raise ValueError("burn difference is defined for k >= 1")
        return self.cardinal[k] - self.cardinal[k - 1]


def top_k_allocation(bids: Sequence, k=INFINITE, reserve=0) -> tuple:
    """Allocate the highest bids that meet ``reserve``, at most ``k`` of them.

    Ties go to the lower index.

    >>> top_k_allocation([3, 3, 3], 2)
    (1, 1, 0)
    """
    check_block_size(k)
    order = sorted(range(len(bids)), key=lambda i: (-bids[i], i))
    slots = cap_block(k, len(bids))
    alloc = [0] * len(bids)
    for i in order[:slots]:
        if bids[i] >= reserve:
            alloc[i] = 1
    return tuple(alloc)


def user_utility(outcome: Outcome, value, i: int):
    if not 0 <= i < len(outcome):
        raise IndexError(f"bidder {i} not in outcome of length {len(outcome)}")
    return value * outcome.allocated[i] - outcome.payments[i]


def miner_utility(outcome: Outcome, profile: BidProfile):
    """Revenue net of burn from real bids, minus the burn on allocated fakes.

    The payment of an allocated fake bid comes back to the miner, only its
    burn is lost.
    """
    if len(outcome) != len(profile):
        raise ValueError("outcome and profile lengths differ")
    total = Fraction(0)
    for i in range(len(outcome)):
        if not outcome.allocated[i]:
            continue
        if i < profile.real_count:
            total += outcome.payments[i] - outcome.burns[i]
        else:
            total -= outcome.burns[i]
    return total


def joint_utility(outcome: Outcome, coalition: Iterable[int], values, profile: BidProfile):
    coalition = set(coalition)
    if any(not 0 <= i < profile.real_count for i in coalition):
        raise ValueError("coalition members must be real bidders")
    vals = values.values if isinstance(values, ValuationProfile) else tuple(values)
    total = miner_utility(outcome, profile)
    for i in sorted(coalition):
        total += user_utility(outcome, vals[i], i)
    return total
