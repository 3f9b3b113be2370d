"""Conservative multiplicative asset-exchange toolkit.

Thin python surface over the C++ core: return distributions, the
small-wealth exponent solver, the exchange engine, the stationary kinetic
solver, and the reversibility checks.
"""

from aexch._core import (
    ExponentReport,
    GainMoments,
    GammaApprox,
    Phase,
    ReturnDistribution,
    SlopeFit,
    WealthHistogram,
    __version__,
    backward_rate,
    exponential_condition_residual,
    flat_interface_residual,
    flat_t1_parameterization,
    forward_rate,
    gamma_approx,
    gini,
    histogram,
    kolmogorov_distance_exp,
    moment_drift,
    predicted_rank_wealth,
    rank_profile,
    rescaled_to_unit_mean,
    simulate,
    small_w_exponent,
    solve_exponent,
    solve_fixed_point,
    trade,
    violation,
    yard_sale_critical_p,
)

__all__ = [
    "ExponentReport",
    "GainMoments",
    "GammaApprox",
    "Phase",
    "ReturnDistribution",
    "SlopeFit",
    "WealthHistogram",
    "__version__",
    "backward_rate",
    "exponential_condition_residual",
    "flat_interface_residual",
    "flat_t1_parameterization",
    "forward_rate",
    "gamma_approx",
    "gini",
    "histogram",
    "kolmogorov_distance_exp",
    "moment_drift",
    "predicted_rank_wealth",
    "rank_profile",
    "rescaled_to_unit_mean",
    "simulate",
    "small_w_exponent",
    "solve_exponent",
    "solve_fixed_point",
    "trade",
    "violation",
    "yard_sale_critical_p",
]
