"""Secrecy rate regions for relay broadcast channels.

Closed-form Gaussian strategy regions (decode-forward, noise-forward,
compress-forward, no-relay baselines), discrete-memoryless evaluation of the
twelve-bound catalog, Pareto frontier sweeps, and a CSV-emitting CLI.
"""

from .bounds import (
    AuxiliaryCoupling,
    BoundEvaluation,
    THEOREMS,
    branch_condition,
    build_cf_coupling,
    compose_full_joint,
    corollary_constraints,
    corollary_member,
    evaluate_membership,
    mi_terms,
)
from .dmc import DMCModel, RateTuple
from .errors import (
    BudgetExceededError,
    InfeasibleError,
    ModelAssumptionError,
    RelaySecError,
    UsageError,
    ValidationError,
)
from .gaussian import (
    GaussianNetwork,
    RatePair,
    StrategyParams,
    b_baseline_norelay,
    b_cf,
    b_df,
    b_nf,
    c_baseline,
    c_cf,
    c_df,
    c_nf,
    cf_rstar_max,
)
from .pmf import (
    FactorizationPattern,
    FinitePMF,
    JointPMF,
    check_factorization,
    cond_mutual_info,
    entropy,
)
from .regionsearch import brute_force_best, secrecy_region_extremes
from .scenario import Scenario, load_scenario
from .sweep import (
    Curve,
    Frontier,
    GridSpec,
    max_r1_vs_alpha,
    pareto_filter,
    region_boundary,
    sweep_frontier,
)

__version__ = "0.1.0"

__all__ = [
    "AuxiliaryCoupling",
    "BoundEvaluation",
    "BudgetExceededError",
    "Curve",
    "DMCModel",
    "FactorizationPattern",
    "FinitePMF",
    "Frontier",
    "GaussianNetwork",
    "GridSpec",
    "InfeasibleError",
    "JointPMF",
    "ModelAssumptionError",
    "RatePair",
    "RateTuple",
    "RelaySecError",
    "Scenario",
    "StrategyParams",
    "THEOREMS",
    "UsageError",
    "ValidationError",
    "b_baseline_norelay",
    "b_cf",
    "b_df",
    "b_nf",
    "branch_condition",
    "brute_force_best",
    "build_cf_coupling",
    "c_baseline",
    "c_cf",
    "c_df",
    "c_nf",
    "cf_rstar_max",
    "check_factorization",
    "compose_full_joint",
    "cond_mutual_info",
    "corollary_constraints",
    "corollary_member",
    "entropy",
    "evaluate_membership",
    "load_scenario",
    "max_r1_vs_alpha",
    "mi_terms",
    "pareto_filter",
    "region_boundary",
    "secrecy_region_extremes",
    "sweep_frontier",
]
