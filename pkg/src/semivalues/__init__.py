"""Estimation of probabilistic values (Beta-kernel Shapley family, weighted
Banzhaf, arbitrary semi-values) from shared sample streams, with exact
oracles, thirteen baseline estimators, datamodel least-squares bridges and a
reproducible convergence benchmark."""

from .backend import kernel_backend
from .games import (Game, GameError, MemoGame, SOUGame, TableGame,
                    exact_semivalue_bruteforce, exact_semivalue_sou,
                    full_utility_table, sou_generate)
from .ofa import (BucketEstimates, SamplingVector, aggregate,
                  collect_bucket_trace, d_value, gamma_value, mean_d, q_ofa_a,
                  q_ofa_s, run_ofa, sample_complexity_bound)
from .traces import EstimateTrace
from .weights import (SHAPLEY, BetaShapley, Custom, SemivalueSpec, SpecError,
                      WeightedBanzhaf, WeightVector, make_weights, moment,
                      normalize_custom, parse_semivalue, semivalue_label)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "Game", "GameError", "MemoGame", "SOUGame", "TableGame",
    "exact_semivalue_bruteforce", "exact_semivalue_sou",
    "full_utility_table", "sou_generate",
    "BucketEstimates", "SamplingVector", "aggregate", "collect_bucket_trace",
    "d_value", "gamma_value", "mean_d", "q_ofa_a", "q_ofa_s", "run_ofa",
    "sample_complexity_bound",
    "EstimateTrace",
    "SHAPLEY", "BetaShapley", "Custom", "SemivalueSpec", "SpecError",
    "WeightedBanzhaf", "WeightVector", "make_weights", "moment",
    "normalize_custom", "parse_semivalue", "semivalue_label",
    "__version__",
]
