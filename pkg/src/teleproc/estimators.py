"""Point estimators for the switching rate, volatility and speed.

Rate, from grid positions: root of the step-likelihood derivative,
direct likelihood maximisation, or moment matching of the increment
variance.  Volatility and rate for the geometric model work on log
returns with the drift assumed known.  A latent-path filter turns log
returns back into an approximate position grid, and the event-count
oracle is available whenever the continuous path itself is (simulation
studies only).

All estimators are deterministic functions of their inputs and report
their search work through EstimateResult.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .likelihood import IncrementDecomposition, decompose, log_likelihood, score
from .process import (
    GeometricGridSample,
    GridSample,
    TelegraphPath,
    displacement_variance,
)
from .solvers import golden_section_max, solve_root

METHODS = ("score_root", "argmax", "least_squares", "sigma_hat", "lambda_dot", "oracle")


@dataclass(frozen=True)
class EstimatorOptions:
    """Search configuration shared by the rate estimators."""

    bracket_lo: float = 1e-8
    bracket_hi: float = 1.0
    rate_max: float = 1e4  # stop expanding the score bracket here
    rate_cap: float = 3.0  # search bound for the variance inversions
    tol: float = 1e-10  # absolute tolerance on the rate

    def __post_init__(self):
        if not 0.0 < self.bracket_lo < self.bracket_hi <= self.rate_max:
            raise ValueError("need 0 < bracket_lo < bracket_hi <= rate_max")
        if not self.rate_cap > 0.0:
            raise ValueError("rate_cap must be positive")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")


DEFAULT_OPTIONS = EstimatorOptions()


@dataclass(frozen=True)
class EstimateResult:
    """One point estimate plus its search diagnostics.

    valid=False is the documented sentinel for "the defining equation has
    no admissible solution on this sample" (estimate is then 0).
    converged=False with valid=True marks a search stopped at its
    configured bound, estimate sitting on that bound.
    """

    estimate: float
    method: str
    valid: bool
    converged: bool
    iterations: int = 0
    bounds: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.estimate < 0.0:
            raise ValueError("estimates are nonnegative by construction")


@dataclass(frozen=True)
class LogReturns:
    """Log price increments on the grid, with the known drift."""

    values: np.ndarray
    delta: float
    mu: float

    def __post_init__(self):
        y = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", y)
        if y.ndim != 1 or y.size < 1:
            raise ValueError("need a one-dimensional, nonempty return series")
        if not np.all(np.isfinite(y)):
            raise ValueError("returns must be finite")
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError("delta must be a positive finite number")
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")

    @property
    def n(self) -> int:
        return self.values.size

    def mean(self) -> float:
        return float(np.mean(self.values))

    def centered_second_moment(self) -> float:
        """(1/n) sum (Y_i - mean)^2; the 1/n convention, not 1/(n-1)."""
        return float(np.mean((self.values - np.mean(self.values)) ** 2))


def log_returns(sample: GeometricGridSample) -> LogReturns:
    """Log returns of a geometric grid sample, drift read off its params."""
    return LogReturns(
        np.diff(np.log(sample.prices)), sample.delta, sample.params.drift
    )


def _as_decomposition(data) -> IncrementDecomposition:
    if isinstance(data, GridSample):
        return decompose(data)
    if isinstance(data, IncrementDecomposition):
        return data
    raise TypeError("expected a GridSample or IncrementDecomposition")


def _expand_score_bracket(decomp, opts):
    """Grow [bracket_lo, ...] upward until the score turns negative.

    Returns (lo, hi, f_lo, f_hi, evals) or None when the score stays
    positive all the way to rate_max (caller reports the capped result).
    """
    f_lo = score(opts.bracket_lo, decomp)
    evals = 1
    if f_lo <= 0.0:
        return opts.bracket_lo, None, f_lo, None, evals
    lo, hi = opts.bracket_lo, opts.bracket_hi
    f_hi = score(hi, decomp)
    evals += 1
    while f_hi > 0.0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > opts.rate_max:
            return None, None, None, None, evals
        f_hi = score(hi, decomp)
        evals += 1
    return lo, hi, f_lo, f_hi, evals


def lambda_score_root(data, opts: EstimatorOptions = DEFAULT_OPTIONS) -> EstimateResult:
    """Rate at which the step-likelihood derivative crosses zero.

    With no interior increment the derivative is a negative constant, so
    there is nothing to solve: the no-solution sentinel comes back.
    """
    decomp = _as_decomposition(data)
    if decomp.n_interior == 0:
        return EstimateResult(0.0, "score_root", valid=False, converged=False)
    lo, hi, f_lo, f_hi, evals = _expand_score_bracket(decomp, opts)
    if lo is None:
        return EstimateResult(
            opts.rate_max,
            "score_root",
            valid=True,
            converged=False,
            iterations=evals,
            bounds=(opts.bracket_lo, opts.rate_max),
        )
    if hi is None:
        # derivative already negative at the smallest searchable rate
        return EstimateResult(0.0, "score_root", valid=False, converged=False, iterations=evals)
    root, solver_evals = solve_root(
        lambda r: score(r, decomp), lo, hi, f_lo=f_lo, f_hi=f_hi, tol=opts.tol
    )
    return EstimateResult(
        root,
        "score_root",
        valid=True,
        converged=True,
        iterations=evals + solver_evals,
        bounds=(lo, hi),
    )


def lambda_argmax(data, opts: EstimatorOptions = DEFAULT_OPTIONS) -> EstimateResult:
    """Rate maximising the step log-likelihood by golden-section search.

    Must land within 1e-6 of lambda_score_root whenever both converge;
    the maximum is bracketed by the same sign-change expansion.
    """
    decomp = _as_decomposition(data)
    if decomp.n_interior == 0:
        return EstimateResult(0.0, "argmax", valid=False, converged=False)
    lo, hi, _, _, evals = _expand_score_bracket(decomp, opts)
    if lo is None:
        return EstimateResult(
            opts.rate_max,
            "argmax",
            valid=True,
            converged=False,
            iterations=evals,
            bounds=(opts.bracket_lo, opts.rate_max),
        )
    if hi is None:
        return EstimateResult(0.0, "argmax", valid=False, converged=False, iterations=evals)
    best, golden_evals = golden_section_max(
        lambda r: log_likelihood(r, decomp), lo, hi, tol=opts.tol
    )
    return EstimateResult(
        best,
        "argmax",
        valid=True,
        converged=True,
        iterations=evals + golden_evals,
        bounds=(lo, hi),
    )


def _invert_variance(target, speed, delta, opts, method):
    """Solve displacement_variance(rate) = target on (0, rate_cap].

    The variance decreases strictly from (speed*delta)^2 at rate 0, so a
    target at or above that has no solution (sentinel), and a target
    below the cap's variance sits beyond the search bound (capped).
    """
    bound = (speed * delta) ** 2
    if target >= bound:
        return EstimateResult(0.0, method, valid=False, converged=False)
    def g(rate):
        return displacement_variance(rate, speed, delta) - target

    g_cap = g(opts.rate_cap)
    if g_cap > 0.0:
        return EstimateResult(
            opts.rate_cap,
            method,
            valid=True,
            converged=False,
            iterations=1,
            bounds=(0.0, opts.rate_cap),
        )
    root, evals = solve_root(
        g, 0.0, opts.rate_cap, f_lo=bound - target, f_hi=g_cap, tol=opts.tol
    )
    return EstimateResult(
        root,
        method,
        valid=True,
        converged=True,
        iterations=1 + evals,
        bounds=(0.0, opts.rate_cap),
    )


def lambda_least_squares(
    sample: GridSample, opts: EstimatorOptions = DEFAULT_OPTIONS
) -> EstimateResult:
    """Rate matching the mean squared increment to its model value."""
    dx = np.diff(sample.values)
    m2 = float(np.mean(dx * dx))
    if m2 == 0.0:
        raise ValueError("all increments are zero; not a telegraph sample")
    return _invert_variance(m2, sample.speed, sample.delta, opts, "least_squares")


def sigma_hat(returns: LogReturns) -> EstimateResult:
    """Volatility from the mean log return and the known drift.

    Depends on the data only through the final position, so refining the
    grid of the same path does not change the estimate.
    """
    gap = returns.mu - returns.mean() / returns.delta
    if gap <= 0.0:
        return EstimateResult(0.0, "sigma_hat", valid=False, converged=False)
    return EstimateResult(
        math.sqrt(2.0 * gap), "sigma_hat", valid=True, converged=True
    )


def lambda_dot(
    returns: LogReturns,
    sigma: float | EstimateResult,
    speed: float,
    opts: EstimatorOptions = DEFAULT_OPTIONS,
) -> EstimateResult:
    """Rate matching the centered return variance, volatility plugged in.

    An invalid or nonpositive volatility propagates to an invalid result
    rather than raising: the failure is a legitimate sample outcome.
    """
    if isinstance(sigma, EstimateResult):
        if not sigma.valid:
            return EstimateResult(0.0, "lambda_dot", valid=False, converged=False)
        sigma = sigma.estimate
    if not sigma > 0.0:
        return EstimateResult(0.0, "lambda_dot", valid=False, converged=False)
    target = returns.centered_second_moment() / (sigma * sigma)
    return _invert_variance(target, speed, returns.delta, opts, "lambda_dot")


def filter_states(returns: LogReturns, sigma: float | EstimateResult) -> np.ndarray:
    """Reconstructed grid positions from standardized log returns.

    Centering by the sample mean pins the reconstructed endpoint to
    exactly zero (a bridge artifact worth remembering when comparing
    against the true path).
    """
    if isinstance(sigma, EstimateResult):
        sigma = sigma.estimate if sigma.valid else 0.0
    if not sigma > 0.0:
        raise ValueError("filtering requires a positive volatility")
    z = (returns.values - np.mean(returns.values)) / sigma
    return np.cumsum(z)


def filtered_sample(returns: LogReturns, sigma: float | EstimateResult) -> GridSample:
    """Positions from filter_states packaged with their implied speed.

    The speed is taken from the largest filtered increment, which puts
    that increment exactly on the cone boundary, as an event-free one
    would be.
    """
    x = filter_states(returns, sigma)
    values = np.concatenate(([0.0], x))
    top = float(np.max(np.abs(np.diff(values))))
    if top <= 0.0:
        raise ValueError("filtered increments are all zero; no speed scale")
    return GridSample(values, returns.delta, top / returns.delta)


def v_hat(sample: GridSample) -> float:
    """Largest increment speed; exact whenever some increment is event-free."""
    return float(np.max(np.abs(np.diff(sample.values)))) / sample.delta


def lambda_oracle(path: TelegraphPath) -> float:
    """Event count over elapsed time, the continuous-observation benchmark."""
    return path.switch_count / path.horizon
