"""Hierarchical Bayesian noise inference and sequential classifier filtering.

A generative Dirichlet observation model with per-class concentration
parameters under a shared gamma prior, Metropolis-Hastings posterior
inference of those noise levels, four sequential classification filters,
a durative macro-observation process for decision-theoretic planners,
and a Monte Carlo benchmark CLI.
"""

__version__ = "0.1.0"

from .core import (
    CLAMP_EPS,
    HyperParams,
    ObservationSequence,
    as_simplex,
    clamp_simplex,
    log_categorical,
    log_dirichlet_generic,
    log_dirichlet_hbni,
    log_gamma_density,
    log_gamma_kernel,
)
from .filters import (
    ClassPosterior,
    HBNIFilter,
    MaxOfMeanFilter,
    SequentialFilter,
    StaticStateBayesFilter,
    VotingFilter,
    batch,
    make_filter,
    max_of_mean,
    vote,
)
from .genmodel import (
    GenerativeConfig,
    generate_dataset,
    sample_class,
    sample_observation,
    sample_theta,
)
from .inference import (
    ChainState,
    ChainSummary,
    MHConfig,
    NoiseInference,
    hyperprior_for_theta_median,
    implied_theta_median,
    log_joint,
    mh_step,
    run_chain,
    summarize_noise_posterior,
)
from .macroobs import (
    MacroObsModel,
    MacroObservation,
    estimate_model,
    run_macro_observation,
    sample_macro_observation,
)

__all__ = [
    "CLAMP_EPS",
    "ChainState",
    "ChainSummary",
    "ClassPosterior",
    "GenerativeConfig",
    "HBNIFilter",
    "HyperParams",
    "MHConfig",
    "MacroObsModel",
    "MacroObservation",
    "MaxOfMeanFilter",
    "NoiseInference",
    "ObservationSequence",
    "SequentialFilter",
    "StaticStateBayesFilter",
    "VotingFilter",
    "as_simplex",
    "batch",
    "clamp_simplex",
    "estimate_model",
    "generate_dataset",
    "hyperprior_for_theta_median",
    "implied_theta_median",
    "log_categorical",
    "log_dirichlet_generic",
    "log_dirichlet_hbni",
    "log_gamma_density",
    "log_gamma_kernel",
    "log_joint",
    "make_filter",
    "max_of_mean",
    "mh_step",
    "run_chain",
    "run_macro_observation",
    "sample_class",
    "sample_macro_observation",
    "sample_observation",
    "sample_theta",
    "summarize_noise_posterior",
    "vote",
    "__version__",
]
