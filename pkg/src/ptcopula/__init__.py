"""Piecing-together simulation of GPD-copulas and generalized Pareto processes."""
from .copulas import (
    ClaytonCopula,
    ComonotoneCopula,
    CopulaModel,
    GaussianCopula,
    GumbelCopula,
    IndependenceCopula,
    make_copula,
)
from .dnorm import (
    DNorm,
    MCEstimate,
    eval_dnorm,
    pickands,
    tail_copula,
    tail_copula_via_inclusion_exclusion,
)
from .empirical import (
    RankMatrix,
    empirical_copula_cdf,
    empirical_pt_sample,
    empirical_threshold,
    empirical_thinned_dnorm,
    standardized_ranks,
)
from .errors import PTError
from .functional import (
    ComonotoneCopulaProcess,
    FunctionalPTConfig,
    GaussianCopulaProcess,
    GPCopulaProcess,
    GridPath,
    functional_pt_sample,
    functional_thinned_dnorm,
    sample_gpcp,
    sample_gpp,
)
from .generators import (
    GeneratorProcessSpec,
    GeneratorSpec,
    make_basis_generator_process,
    make_bernoulli_mixture_generator,
    make_constant_generator,
    make_custom_generator,
    make_scaled_copula_generator,
    make_unit_vector_generator,
    sample_generator,
)
from .gpd_copula import GPFunction, GpdCopulaModel, gp_function_eval, gpd_copula_cdf_upper, sample_gpd_copula
from .kernels import BACKEND
from .pt import PTConfig, inject_margins, pt_exact_region, pt_sample, thinned_dnorm, thinned_generator
from .rng import stream
from .univariate import UnivariatePT, fit_gpd_tail, high_quantile, univariate_pt

__version__ = "0.1.0"

__all__ = [
    "ClaytonCopula",
    "ComonotoneCopula",
    "CopulaModel",
    "GaussianCopula",
    "GumbelCopula",
    "IndependenceCopula",
    "make_copula",
    "DNorm",
    "MCEstimate",
    "eval_dnorm",
    "pickands",
    "tail_copula",
    "tail_copula_via_inclusion_exclusion",
    "RankMatrix",
    "empirical_copula_cdf",
    "empirical_pt_sample",
    "empirical_threshold",
    "empirical_thinned_dnorm",
    "standardized_ranks",
    "PTError",
    "ComonotoneCopulaProcess",
    "FunctionalPTConfig",
    "GaussianCopulaProcess",
    "GPCopulaProcess",
    "GridPath",
    "functional_pt_sample",
    "functional_thinned_dnorm",
    "sample_gpcp",
    "sample_gpp",
    "GeneratorProcessSpec",
    "GeneratorSpec",
    "make_basis_generator_process",
    "make_bernoulli_mixture_generator",
    "make_constant_generator",
    "make_custom_generator",
    "make_scaled_copula_generator",
    "make_unit_vector_generator",
    "sample_generator",
    "GPFunction",
    "GpdCopulaModel",
    "gp_function_eval",
    "gpd_copula_cdf_upper",
    "sample_gpd_copula",
    "BACKEND",
    "PTConfig",
    "inject_margins",
    "pt_exact_region",
    "pt_sample",
    "thinned_dnorm",
    "thinned_generator",
    "stream",
    "UnivariatePT",
    "fit_gpd_tail",
    "high_quantile",
    "univariate_pt",
    "__version__",
]
