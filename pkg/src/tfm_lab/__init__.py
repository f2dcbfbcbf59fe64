"""Transaction fee mechanism laboratory.

Mechanisms, finite-grid incentive checkers, equilibrium bidding and revenue
analysis for blockchain transaction fee auctions.
"""
from .core import (
    INFINITE,
    BidProfile,
    BurnSchedule,
    GridError,
    Outcome,
    ValuationProfile,
    joint_utility,
    miner_utility,
    top_k_allocation,
    user_utility,
)
from .equilibrium import (
    BisectionError,
    UnverifiedRange,
    best_response_gap,
    exponential_order_stat_mean,
    harmonic,
    poly_P,
    shade_bid_uniform,
    uniform_order_stat_mean,
    win_probability,
)
from .mechanisms import (
    GTA,
    PABGA,
    UPGA,
    Mechanism,
    MyersonUniform,
    Shading,
    SupplyLimitedPABGA,
    TopBidBurnPABGA,
    WellReserved,
    make_mechanism,
    run_mechanism,
    shading_outcome,
)
from .properties import (
    BudgetExceeded,
    CheckConfig,
    Property,
    PropertyReport,
    Verdict,
    audit_revenue_bound,
    check_dsic,
    check_epbb,
    check_epir,
    check_mmic,
    check_oca,
    check_scp,
    check_separable,
    validate_oca_structure,
)
from .revenue import (
    Exponential,
    RevenueEstimate,
    Uniform,
    bulow_klemperer_check,
    expectation_of_ratio_check,
    exponential_ratio_of_expectations,
    mc_revenue_and_surplus,
    revenue_equivalence_check,
    revenue_optimal_class_check,
    uniform_pabga_revenue_exact,
    uniform_ratio_of_expectations,
)

__version__ = "0.1.0"
