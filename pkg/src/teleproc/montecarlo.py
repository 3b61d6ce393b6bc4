"""Replication harness: simulate, resample at several grid sizes, estimate.

One continuous path is simulated per (rate, replication) and resampled
for every grid size, so rows of the summary tables differ only through
the grid, not through fresh randomness.  Each replication owns an RNG
stream keyed by (seed, rate index, replication index); results land in
a buffer indexed by replication, which makes summaries bit-identical no
matter how many worker processes executed them.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .estimators import (
    DEFAULT_OPTIONS,
    EstimateResult,
    EstimatorOptions,
    METHODS,
    lambda_argmax,
    lambda_dot,
    lambda_least_squares,
    lambda_oracle,
    lambda_score_root,
    log_returns,
    sigma_hat,
)
from .likelihood import decompose
from .process import (
    ModelParams,
    replication_rng,
    sample_on_grid,
    simulate_path,
    to_geometric,
)

_GEOMETRIC_METHODS = frozenset({"sigma_hat", "lambda_dot"})


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one Monte Carlo experiment."""

    rates: tuple[float, ...]
    grid_sizes: tuple[int, ...]
    horizon: float
    speed: float
    replications: int
    seed: int
    methods: tuple[str, ...] = ("score_root", "argmax", "least_squares")
    options: EstimatorOptions = field(default_factory=EstimatorOptions)
    drift: float | None = None
    volatility: float | None = None
    start_price: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        object.__setattr__(self, "grid_sizes", tuple(int(n) for n in self.grid_sizes))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.rates or any(r <= 0.0 for r in self.rates):
            raise ValueError("rates must be a nonempty list of positive values")
        if not self.grid_sizes or any(n < 1 for n in self.grid_sizes):
            raise ValueError("grid sizes must be a nonempty list of positive integers")
        if not (self.horizon > 0.0 and self.speed > 0.0):
            raise ValueError("horizon and speed must be positive")
        if self.replications < 1:
            raise ValueError("need at least one replication")
        unknown = set(self.methods) - set(METHODS)
        if not self.methods or unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}" if unknown else "no methods selected")
        if _GEOMETRIC_METHODS & set(self.methods) and (
            self.drift is None or self.volatility is None
        ):
            raise ValueError("geometric methods need drift and volatility")

    def model_params(self, rate: float) -> ModelParams:
        if self.volatility is None:
            return ModelParams(rate=rate, speed=self.speed)
        return ModelParams(
            rate=rate,
            speed=self.speed,
            drift=self.drift,
            volatility=self.volatility,
            start_price=self.start_price,
        )


@dataclass(frozen=True)
class McSummary:
    """Aggregates for one (method, rate, grid size) cell.

    Moments are taken over valid replications only; a cell with none has
    NaN markers.  mc_se is the standard error of the mean estimate, the
    right yardstick for comparing bias against a reference table.
    """

    method: str
    rate: float
    n: int
    bias: float
    rmse: float
    min_est: float
    max_est: float
    pct_valid: float
    n_used: int
    mc_se: float


@dataclass(frozen=True)
class Replication:
    """One estimator outcome, as dumped to the replication CSV."""

    rep: int
    rate: float
    n: int
    method: str
    estimate: float
    valid: bool
    converged: bool


def summarize_arrays(estimates, valid, rate_true, n, method) -> McSummary:
    """McSummary from parallel arrays of estimates and validity flags."""
    estimates = np.asarray(estimates, dtype=float)
    valid = np.asarray(valid, dtype=bool)
    if estimates.size == 0 or estimates.shape != valid.shape:
        raise ValueError("need matching nonempty estimate/valid arrays")
    used = estimates[valid]
    pct = 100.0 * used.size / estimates.size
    if used.size == 0:
        nan = float("nan")
        return McSummary(method, rate_true, n, nan, nan, nan, nan, 0.0, 0, nan)
    err = used - rate_true
    bias = float(np.mean(err))
    rmse = float(math.sqrt(np.mean(err * err)))
    mc_se = float(np.std(used, ddof=1) / math.sqrt(used.size)) if used.size > 1 else float("nan")
    return McSummary(
        method,
        rate_true,
        n,
        bias,
        rmse,
        float(np.min(used)),
        float(np.max(used)),
        pct,
        int(used.size),
        mc_se,
    )


def summarize(results, rate_true, n=0) -> McSummary:
    """McSummary from a list of EstimateResult of one method."""
    if not results:
        raise ValueError("need at least one result")
    methods = {r.method for r in results}
    if len(methods) > 1:
        raise ValueError("mixed methods in one summary")
    return summarize_arrays(
        [r.estimate for r in results],
        [r.valid for r in results],
        rate_true,
        n,
        methods.pop(),
    )


def _replication_block(spec: ExperimentSpec, rate_index: int, rep_lo: int, rep_hi: int):
    """Estimates for replications [rep_lo, rep_hi) of one rate.

    Returns an array of shape (reps, len(grid_sizes), len(methods), 3)
    holding (estimate, valid, converged) as floats.
    """
    rate = spec.rates[rate_index]
    params = spec.model_params(rate)
    need_decomp = bool({"score_root", "argmax"} & set(spec.methods))
    need_geo = bool(_GEOMETRIC_METHODS & set(spec.methods))
    out = np.empty((rep_hi - rep_lo, len(spec.grid_sizes), len(spec.methods), 3))
    for rep in range(rep_lo, rep_hi):
        rng = replication_rng(spec.seed, rate_index, rep)
        path = simulate_path(params, spec.horizon, rng=rng)
        oracle = EstimateResult(
            lambda_oracle(path), "oracle", valid=True, converged=True
        )
        for i, n in enumerate(spec.grid_sizes):
            grid = sample_on_grid(path, n)
            decomp = decompose(grid) if need_decomp else None
            if need_geo:
                returns = log_returns(to_geometric(grid, params))
                sig = sigma_hat(returns)
            for j, m in enumerate(spec.methods):
                if m == "score_root":
                    r = lambda_score_root(decomp, spec.options)
                elif m == "argmax":
                    r = lambda_argmax(decomp, spec.options)
                elif m == "least_squares":
                    r = lambda_least_squares(grid, spec.options)
                elif m == "sigma_hat":
                    r = sig
                elif m == "lambda_dot":
                    r = lambda_dot(returns, sig, spec.speed, spec.options)
                else:
                    r = oracle
                out[rep - rep_lo, i, j] = (r.estimate, r.valid, r.converged)
    return out


def run_experiment(
    spec: ExperimentSpec, jobs: int = 1, return_replications: bool = False
):
    """All summaries for the experiment, ordered (method, rate, n).

    jobs > 1 distributes replication blocks over processes; results are
    written into per-replication slots, so the outcome is bit-identical
    to the serial run.  With return_replications=True a flat list of
    Replication records (ordered by rate, rep, n, method) is returned
    alongside the summaries.
    """
    n_rates = len(spec.rates)
    buffers = [
        np.empty((spec.replications, len(spec.grid_sizes), len(spec.methods), 3))
        for _ in range(n_rates)
    ]
    if jobs <= 1:
        for k in range(n_rates):
            buffers[k][:] = _replication_block(spec, k, 0, spec.replications)
    else:
        block = max(1, -(-spec.replications // (jobs * 4)))
        tasks = [
            (k, lo, min(lo + block, spec.replications))
            for k in range(n_rates)
            for lo in range(0, spec.replications, block)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(_replication_block, spec, k, lo, hi): (k, lo, hi)
                for k, lo, hi in tasks
            }
            for fut in as_completed(futures):
                k, lo, hi = futures[fut]
                buffers[k][lo:hi] = fut.result()

    summaries = [
        summarize_arrays(
            buffers[k][:, i, j, 0],
            buffers[k][:, i, j, 1] != 0.0,
            spec.rates[k],
            n,
            method,
        )
        for j, method in enumerate(spec.methods)
        for k in range(n_rates)
        for i, n in enumerate(spec.grid_sizes)
    ]
    if not return_replications:
        return summaries
    rows = [
        Replication(
            rep,
            spec.rates[k],
            n,
            method,
            float(buffers[k][rep, i, j, 0]),
            bool(buffers[k][rep, i, j, 1]),
            bool(buffers[k][rep, i, j, 2]),
        )
        for k in range(n_rates)
        for rep in range(spec.replications)
        for i, n in enumerate(spec.grid_sizes)
        for j, method in enumerate(spec.methods)
    ]
    return summaries, rows
