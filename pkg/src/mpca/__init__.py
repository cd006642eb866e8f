"""Robust two-way factor analysis of matrix-valued time series.

Each observation is a p x q matrix X_t = R F_t C' + E_t with low-rank
signal and possibly heavy-tailed noise.  The package estimates the row
and column loading spaces by averaging per-observation subspaces
(manifold PCA), selects the factor numbers by eigenvalue ratios, and
ships the classical covariance-based baselines, a synthetic data
generator, evaluation metrics and a Monte Carlo harness.
"""

from .model import (
    Ranks,
    LoadingPair,
    FactorModelFit,
    GroundTruth,
    as_observations,
    factor_scores,
    common_components,
    aligned_factor_error,
)
from .sampling import (
    Gaussian,
    StudentT,
    SkewedT,
    AlphaStable,
    SimulationConfig,
    sample_alpha_stable,
    sample_skewed_t,
    build_noise_covs,
    gen_dataset,
    distribution_from_tag,
)
from .estimators import (
    IterationControl,
    best_subspace_op,
    average_projectors,
    mpca_op,
    mpca_f,
    pca_2d2,
    pe_estimate,
    varimax,
)
from .ranks import (
    RankSelection,
    per_obs_rank,
    aggregate_ranks,
    mer_op,
    mer_f,
    baseline_rank,
    select_rank,
)
from .metrics import (
    MetricsReport,
    space_distance,
    cc_errors,
    evaluate_fit,
    rolling_validate,
)
from .harness import (
    ExperimentSpec,
    ResultsTable,
    run_monte_carlo,
    ingest_portfolios,
    emit_results,
    write_dataset,
    read_dataset,
)

__all__ = [
    "Ranks", "LoadingPair", "FactorModelFit", "GroundTruth",
    "as_observations", "factor_scores", "common_components",
    "aligned_factor_error",
    "Gaussian", "StudentT", "SkewedT", "AlphaStable", "SimulationConfig",
    "sample_alpha_stable", "sample_skewed_t", "build_noise_covs",
    "gen_dataset", "distribution_from_tag",
    "IterationControl", "best_subspace_op", "average_projectors",
    "mpca_op", "mpca_f", "pca_2d2", "pe_estimate", "varimax",
    "RankSelection", "per_obs_rank", "aggregate_ranks", "mer_op", "mer_f",
    "baseline_rank", "select_rank",
    "MetricsReport", "space_distance", "cc_errors", "evaluate_fit",
    "rolling_validate",
    "ExperimentSpec", "ResultsTable", "run_monte_carlo",
    "ingest_portfolios", "emit_results", "write_dataset", "read_dataset",
]
