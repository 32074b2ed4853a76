"""Marginal-likelihood comparison for latent-variable models.

The package turns one fact into machinery: the posterior expectation of
the truncated likelihood ratio min(1, joint2/joint1) under theta1
exceeds its mirror image under theta2 exactly when theta1 has the
smaller marginal likelihood, and both expectations equal the overlap
mass of the two joint densities divided by the respective marginal.
That gives an exactly checkable oracle on enumerable models, a bounded
Monte Carlo estimator everywhere else, and an accept/reject rule for
proposal-driven maximum-likelihood ascent.
"""

from .ascent import AscentConfig, AscentTrace, IterationRecord, gaussian_propose, maximize
from .errors import (
    AscentAbortedError,
    BadInitializationError,
    ConfigError,
    ContractViolationError,
    DegenerateSupportError,
    EnumerationCapError,
    NonIntegrableError,
    StuckChainError,
    TruncratioError,
    UndefinedRatioError,
    UnsupportedCapabilityError,
    WrongOracleError,
)
from .estimator import (
    ComparisonResult,
    Decision,
    TruncatedRatioEstimate,
    compare_likelihoods,
    estimate_truncated_integral,
    likelihood_ratio_from_integrals,
    truncated_log_ratio,
)
from .models import (
    GaussianMixtureModel,
    LatentSpace,
    LatentVariableModel,
    ModelCapabilities,
    RandomEffectsModel,
    TableModel,
    em_step,
    make_gaussian_mixture,
    make_random_effects,
    make_table_model,
    simulate_mixture_data,
    simulate_random_effects_data,
)
from .oracle import (
    DEFAULT_ENUMERATION_CAP,
    ExactIntegrals,
    TheoremCheckReport,
    exact_integrals,
    quadrature_integrals,
    verify_theorem,
)
from .samplers import (
    ChainConfig,
    SampleBatch,
    effective_sample_size,
    rwmh_sample,
    sample_discrete_posterior,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # models
    "LatentSpace",
    "LatentVariableModel",
    "ModelCapabilities",
    "TableModel",
    "make_table_model",
    "GaussianMixtureModel",
    "make_gaussian_mixture",
    "em_step",
    "simulate_mixture_data",
    "RandomEffectsModel",
    "make_random_effects",
    "simulate_random_effects_data",
    # oracle
    "DEFAULT_ENUMERATION_CAP",
    "ExactIntegrals",
    "TheoremCheckReport",
    "exact_integrals",
    "quadrature_integrals",
    "verify_theorem",
    # estimator
    "Decision",
    "TruncatedRatioEstimate",
    "ComparisonResult",
    "truncated_log_ratio",
    "estimate_truncated_integral",
    "likelihood_ratio_from_integrals",
    "compare_likelihoods",
    # samplers
    "ChainConfig",
    "SampleBatch",
    "sample_discrete_posterior",
    "rwmh_sample",
    "effective_sample_size",
    # ascent
    "AscentConfig",
    "AscentTrace",
    "IterationRecord",
    "gaussian_propose",
    "maximize",
    # errors
    "TruncratioError",
    "ContractViolationError",
    "UnsupportedCapabilityError",
    "WrongOracleError",
    "EnumerationCapError",
    "NonIntegrableError",
    "DegenerateSupportError",
    "UndefinedRatioError",
    "BadInitializationError",
    "StuckChainError",
    "ConfigError",
    "AscentAbortedError",
]
