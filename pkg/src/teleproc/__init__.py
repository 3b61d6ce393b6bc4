"""Telegraph process simulation and rate inference on regular time grids."""

from .estimators import (
    DEFAULT_OPTIONS,
    METHODS,
    EstimateResult,
    EstimatorOptions,
    LogReturns,
    filter_states,
    filtered_sample,
    lambda_argmax,
    lambda_dot,
    lambda_least_squares,
    lambda_oracle,
    lambda_score_root,
    log_returns,
    sigma_hat,
    v_hat,
)
from .likelihood import (
    DensityValue,
    IncrementDecomposition,
    decompose,
    log_likelihood,
    score,
    transition_density,
)
from .montecarlo import ExperimentSpec, McSummary, Replication, run_experiment
from .process import (
    ConeViolationError,
    GeometricGridSample,
    GridSample,
    ModelParams,
    TelegraphPath,
    displacement_mean,
    displacement_variance,
    eval_path,
    replication_rng,
    sample_on_grid,
    simulate_path,
    to_geometric,
)

__version__ = "0.1.0"

__all__ = [
    "ConeViolationError",
    "DEFAULT_OPTIONS",
    "DensityValue",
    "EstimateResult",
    "EstimatorOptions",
    "ExperimentSpec",
    "GeometricGridSample",
    "GridSample",
    "IncrementDecomposition",
    "LogReturns",
    "McSummary",
    "METHODS",
    "ModelParams",
    "Replication",
    "TelegraphPath",
    "decompose",
    "displacement_mean",
    "displacement_variance",
    "eval_path",
    "filter_states",
    "filtered_sample",
    "lambda_argmax",
    "lambda_dot",
    "lambda_least_squares",
    "lambda_oracle",
    "lambda_score_root",
    "log_likelihood",
    "log_returns",
    "replication_rng",
    "run_experiment",
    "sample_on_grid",
    "score",
    "sigma_hat",
    "simulate_path",
    "to_geometric",
    "transition_density",
    "v_hat",
]
