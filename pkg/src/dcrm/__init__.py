"""Discounted collective risk models and pay-as-you-drive premium pricing.

The discounted total loss over (0, t] sums i.i.d. claim amounts discounted at
a constant force of interest to each claim's arrival time.  This package
provides Monte Carlo simulation of that loss under homogeneous, deterministic
time-varying, and mileage-driven Cox counting processes, the matching closed
forms (mean, variance, m.g.f.), martingale residual diagnostics, and PAYD net
premium pricing with per-mile reporting.
"""

from .config import ConfigError, ScenarioConfig, load_scenario
from .core import (
    DcrmScenario,
    EventTrace,
    MartingaleResiduals,
    SimulationResult,
    analytic_mean,
    analytic_variance,
    empirical_mgf,
    martingale_residual_mean,
    martingale_residual_variance,
    mgf_exponential_closed,
    mgf_nhpp,
    simulate_discounted_loss,
)
from .distributions import (
    ClaimDistribution,
    Deterministic,
    Exponential,
    Gamma,
    MgfDomainError,
)
from .mileage import (
    AlternatingRenewal,
    ConstantSpeed,
    MileageModel,
    MileagePath,
    Trip,
    TripLog,
    TripLogError,
    TripLogMileage,
    ingest_trip_log,
)
from .payd import (
    CoxPremiumComparison,
    PaydPolicy,
    PremiumQuote,
    mgf_cox,
    price_payd,
    validate_cox_premium,
)
from .processes import (
    ArrivalPath,
    CallableIntensity,
    ConstantIntensity,
    MileageAffineIntensity,
    PiecewiseIntensity,
    intensity_integral,
    simulate_cox,
    simulate_nhpp,
    simulate_poisson_gaps,
)
from .validation import CheckResult, ValidationReport, ValidationSettings, run_validation

__version__ = "0.1.0"

__all__ = [
    "AlternatingRenewal",
    "ArrivalPath",
    "CallableIntensity",
    "CheckResult",
    "ClaimDistribution",
    "ConfigError",
    "ConstantIntensity",
    "ConstantSpeed",
    "CoxPremiumComparison",
    "DcrmScenario",
    "Deterministic",
    "EventTrace",
    "Exponential",
    "Gamma",
    "MartingaleResiduals",
    "MgfDomainError",
    "MileageAffineIntensity",
    "MileageModel",
    "MileagePath",
    "PaydPolicy",
    "PiecewiseIntensity",
    "PremiumQuote",
    "ScenarioConfig",
    "SimulationResult",
    "Trip",
    "TripLog",
    "TripLogError",
    "TripLogMileage",
    "ValidationReport",
    "ValidationSettings",
    "analytic_mean",
    "analytic_variance",
    "empirical_mgf",
    "ingest_trip_log",
    "intensity_integral",
    "load_scenario",
    "martingale_residual_mean",
    "martingale_residual_variance",
    "mgf_cox",
    "mgf_exponential_closed",
    "mgf_nhpp",
    "price_payd",
    "run_validation",
    "simulate_cox",
    "simulate_discounted_loss",
    "simulate_nhpp",
    "simulate_poisson_gaps",
    "validate_cox_premium",
]
