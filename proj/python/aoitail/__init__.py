"""Age-of-information violation bounds, rate optimization, and simulation.

Thin re-export of the compiled extension module.  The heavy lifting —
distribution tail sums, Chernoff and partial-union bounds, the two rate
solvers, and the tandem-queue simulator — lives in C++.
"""

from ._core import (
    BoundKind,
    BoundResult,
    BudgetError,
    ConfigError,
    DistKind,
    InfeasibleError,
    Policy,
    RateSolution,
    ServiceDistribution,
    SimEstimate,
    SolveMethod,
    StabilityWindow,
    SystemConfig,
    alpha_relaxed_single,
    alpha_relaxed_two,
    alpha_tail_factor,
    beta,
    bounded_support_zero_rate,
    compare_policies,
    cross_sum_tail,
    mix_seed,
    minimize_psi_over_s,
    phi_closed_form,
    phi_single,
    phi_two,
    psi_chernoff,
    simulate_violation,
    solve_alpha_ubmp,
    solve_chernoff_ubmp,
    stability_window,
    tagged_departure_violation,
    transient_violation,
)

__all__ = [
    "BoundKind",
    "BoundResult",
    "BudgetError",
    "ConfigError",
    "DistKind",
    "InfeasibleError",
    "Policy",
    "RateSolution",
    "ServiceDistribution",
    "SimEstimate",
    "SolveMethod",
    "StabilityWindow",
    "SystemConfig",
    "alpha_relaxed_single",
    "alpha_relaxed_two",
    "alpha_tail_factor",
    "beta",
    "bounded_support_zero_rate",
    "compare_policies",
    "cross_sum_tail",
    "mix_seed",
    "minimize_psi_over_s",
    "phi_closed_form",
    "phi_single",
    "phi_two",
    "psi_chernoff",
    "simulate_violation",
    "solve_alpha_ubmp",
    "solve_chernoff_ubmp",
    "stability_window",
    "tagged_departure_violation",
    "transient_violation",
]
