"""Busy-period tail asymptotics for negative-drift random walks.

Exponents and most-likely cycle shapes from the increment law's scaled CGF,
a reproducible simulation campaign engine for checking them, and plug-in
estimators that recover the exponents from observed increments.
"""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("busyburst")
except _metadata.PackageNotFoundError:
    __version__ = "0.0.0"

from .errors import (
    BusyBurstError,
    DuplicateStateValue,
    EmptyTable,
    ExcessiveTruncation,
    InsufficientData,
    InvalidProbability,
    ModelError,
    NonConvergence,
    NonNegativeDrift,
    NonNegativeSampleDrift,
    NoPositiveRoot,
    OutOfSupport,
    ReducibleChain,
    SingleState,
)
from .model import (
    FiniteDiscrete,
    FiniteMarkov,
    Gaussian,
    IncrementModel,
    IncrementSampler,
    TwoPoint,
    model_from_dict,
    model_to_dict,
    sample_increments,
    validate,
)
from .ldp import (
    LdpSummary,
    SampledPath,
    SymmetryReport,
    busy_exponent,
    check_symmetry,
    hit_level_exponent,
    lambda_star,
    most_likely_duration,
    predicted_area_path,
    predicted_height_path,
    psi_star,
    psi_star_for_area,
    psi_star_integral,
    rate_function,
    varphi_star,
    xi,
)
from .sim import (
    BusyPeriodOutcome,
    CampaignConfig,
    CampaignResult,
    ExtremeRecords,
    TailTable,
    default_thresholds,
    empirical_log_tail,
    fit_tail_offset,
    run_busy_period,
    run_busy_period_path,
    simulate_campaign,
)
from .est import (
    EmpiricalScgf,
    EstimateReport,
    MarkovEmpirical,
    empirical_scgf_iid,
    empirical_scgf_markov,
    empirical_transition_matrix,
    estimate,
    scgf_from_transitions,
)

__all__ = [
    "BusyBurstError",
    "BusyPeriodOutcome",
    "CampaignConfig",
    "CampaignResult",
    "DuplicateStateValue",
    "EmptyTable",
    "EmpiricalScgf",
    "EstimateReport",
    "ExcessiveTruncation",
    "ExtremeRecords",
    "FiniteDiscrete",
    "FiniteMarkov",
    "Gaussian",
    "IncrementModel",
    "IncrementSampler",
    "InsufficientData",
    "InvalidProbability",
    "LdpSummary",
    "MarkovEmpirical",
    "ModelError",
    "NonConvergence",
    "NonNegativeDrift",
    "NonNegativeSampleDrift",
    "NoPositiveRoot",
    "OutOfSupport",
    "ReducibleChain",
    "SampledPath",
    "SingleState",
    "SymmetryReport",
    "TailTable",
    "TwoPoint",
    "busy_exponent",
    "check_symmetry",
    "default_thresholds",
    "empirical_log_tail",
    "empirical_scgf_iid",
    "empirical_scgf_markov",
    "empirical_transition_matrix",
    "estimate",
    "fit_tail_offset",
    "hit_level_exponent",
    "lambda_star",
    "model_from_dict",
    "model_to_dict",
    "most_likely_duration",
    "predicted_area_path",
    "predicted_height_path",
    "psi_star",
    "psi_star_for_area",
    "psi_star_integral",
    "rate_function",
    "run_busy_period",
    "run_busy_period_path",
    "sample_increments",
    "scgf_from_transitions",
    "simulate_campaign",
    "validate",
    "varphi_star",
    "xi",
]
