"""Exact error probabilities, analytic bounds, and experiment tooling for
output-coded ensemble classification."""

from .bounds import (
    BoundInputs,
    BoundReport,
    chernoff_bound,
    chernoff_lambda,
    chernoff_mu_bound,
    evaluate_bounds,
    feller_bound,
    gs_bound,
    kz_bound,
    kz_value,
    omega_factor,
)
from .code_matrix import (
    CodeMatrix,
    build_code_matrix,
    decode,
    min_row_distance,
    sylvester_hadamard,
)
from .errors import DomainError, EcocError, ModelError, ParseError
from .prob_engine import (
    DependenceModel,
    ErrorProfile,
    ExchangeableModel,
    Independent,
    PairModel,
    bahadur_range,
    binomial_pmf,
    enumerate_outcomes,
    exchangeable_pmf,
    exchangeable_tail,
    pair_correlated_pmf,
    pair_correlated_tail,
    poisson_binomial_pmf,
    tail_iid,
    tail_independent,
    valid_correlation_range,
)
from .simulator import (
    DEFAULT_SEED,
    SimConfig,
    SimResult,
    mc_decode_error,
    mc_threshold_error,
    sample_outcome,
)

__all__ = [
    "BoundInputs",
    "BoundReport",
    "CodeMatrix",
    "DEFAULT_SEED",
    "DependenceModel",
    "DomainError",
    "EcocError",
    "ErrorProfile",
    "ExchangeableModel",
    "Independent",
    "ModelError",
    "PairModel",
    "ParseError",
    "SimConfig",
    "SimResult",
    "bahadur_range",
    "binomial_pmf",
    "build_code_matrix",
    "chernoff_bound",
    "chernoff_lambda",
    "chernoff_mu_bound",
    "decode",
    "enumerate_outcomes",
    "evaluate_bounds",
    "exchangeable_pmf",
    "exchangeable_tail",
    "feller_bound",
    "gs_bound",
    "kz_bound",
    "kz_value",
    "mc_decode_error",
    "mc_threshold_error",
    "min_row_distance",
    "omega_factor",
    "pair_correlated_pmf",
    "pair_correlated_tail",
    "poisson_binomial_pmf",
    "sample_outcome",
    "sylvester_hadamard",
    "tail_iid",
    "tail_independent",
    "valid_correlation_range",
]

__version__ = "0.1.0"
