"""Stability toolkit for GI/G/c/K retrial queues with constant retrial rate.

Closed-form loss probabilities, a regenerative discrete-event simulator of
the original and auxiliary systems, a truncated-CTMC oracle for Markovian
instances, and the (lambda + mu0) * P_loss < mu0 stability check.
"""

from ._core import (
    CycleRecord,
    DistributionSpec,
    PathStats,
    RandomStream,
    RatioEstimate,
    SimOutput,
    StabilityReport,
    SupportBounds,
    SystemConfig,
    __version__,
    bd_loss_solve,
    condition6_holds,
    erlang_b,
    evaluate_stability,
    mean_cycle,
    normal_quantile,
    orbit_empty_fraction,
    ploss_dispatch,
    ploss_md1k,
    ploss_mm1k,
    ploss_mmck,
    ratio_estimate,
    retrial_orbit_diagnostics,
    simulate,
    stability_gap,
    stability_intervals_mu0,
)

__all__ = [
    "CycleRecord",
    "DistributionSpec",
    "PathStats",
    "RandomStream",
    "RatioEstimate",
    "SimOutput",
    "StabilityReport",
    "SupportBounds",
    "SystemConfig",
    "__version__",
    "bd_loss_solve",
    "condition6_holds",
    "erlang_b",
    "evaluate_stability",
    "mean_cycle",
    "normal_quantile",
    "orbit_empty_fraction",
    "ploss_dispatch",
    "ploss_md1k",
    "ploss_mm1k",
    "ploss_mmck",
    "ratio_estimate",
    "retrial_orbit_diagnostics",
    "simulate",
    "stability_gap",
    "stability_intervals_mu0",
]
