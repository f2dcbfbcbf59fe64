"""Shared fixtures: deliberately broken mechanisms used as negative controls."""
from dataclasses import dataclass
from fractions import Fraction

import pytest
from hypothesis import settings

from tfm_lab.mechanisms import PABGA

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@dataclass(frozen=True)
class OverchargePABGA(PABGA):
    """Charges every allocated bid one unit more than it offered."""

    @property
    def name(self):
        return "OverchargePABGA"

    def payment_rule(self, bids):
        return tuple(b + 1 for b in bids)


@dataclass(frozen=True)
class DoubleBurnPABGA(PABGA):
    """Burns twice the payment."""

    @property
    def name(self):
        return "DoubleBurnPABGA"

    def burn_rule(self, bids):
        return tuple(2 * b for b in bids)


@dataclass(frozen=True)
class ChargeUnallocated(PABGA):
    """Intended outcome charges the top loser too, bypassing the allocation mask."""

    @property
    def name(self):
        return "ChargeUnallocated"

    def outcome(self, bids, allocation=None):
        out = super().outcome(bids, allocation)
        pay = list(out.payments)
        for i, a in enumerate(out.allocated):
            if not a and bids[i] > 0:
                pay[i] = Fraction(bids[i])
                break
        return type(out)(out.allocated, tuple(pay), out.burns)


@pytest.fixture
def overcharge():
    return OverchargePABGA(block_size=1)


@pytest.fixture
def double_burn():
    return DoubleBurnPABGA(block_size=1)
