"""Mixture importance sampling with cross-entropy/EM parameter selection."""

from .engine import (
    CeConfig,
    PilotEvaluation,
    basic_update,
    evaluate_pilot,
    mixture_update,
    run_ce,
    surrogate_objective,
)
from .estimate import EstimateReport, is_estimate, plain_mc_estimate, variance_ratio
from .experiments import (
    ExperimentConfig,
    ResultRow,
    list_models,
    reproduce_table,
    run_experiment,
)
from .initialization import (
    RarityConfig,
    init_approx,
    init_perturbation,
    init_rarity_ce,
)
from .mixture import (
    MixtureParam,
    SampleBatch,
    likelihood_ratio,
    log_component_density,
    log_mixture_density,
    posterior,
    sample_mixture,
)
from .models import (
    AsianCall,
    CevDigital,
    PyramidOption,
    RainbowOption,
    TwoSidedTail,
    rarity_embedding,
)
from .numerics import bisect_root, cholesky, normal_cdf, order_statistic
from .rng import RngStream

__all__ = [
    "AsianCall", "CeConfig", "CevDigital", "EstimateReport", "ExperimentConfig",
    "MixtureParam", "PilotEvaluation", "PyramidOption", "RainbowOption",
    "RarityConfig", "ResultRow", "RngStream", "SampleBatch", "TwoSidedTail",
    "basic_update", "bisect_root", "cholesky", "evaluate_pilot", "init_approx",
    "init_perturbation", "init_rarity_ce", "is_estimate", "likelihood_ratio",
    "list_models", "log_component_density", "log_mixture_density",
    "mixture_update", "normal_cdf", "order_statistic", "plain_mc_estimate",
    "posterior", "rarity_embedding", "reproduce_table", "run_ce",
    "run_experiment", "sample_mixture", "surrogate_objective", "variance_ratio",
]
