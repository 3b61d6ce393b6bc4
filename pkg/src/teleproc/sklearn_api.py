"""Estimator objects in the scikit-learn fit/attribute idiom.

Thin wrappers over the functional interface: construction stores
hyperparameters untouched (so clone/get_params work), fit validates and
delegates, fitted values land in trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .estimators import (
    EstimatorOptions,
    LogReturns,
    lambda_argmax,
    lambda_dot,
    lambda_least_squares,
    lambda_score_root,
    sigma_hat,
)
from .likelihood import decompose, log_likelihood
from .process import GridSample

_RATE_METHODS = ("score_root", "argmax", "least_squares")


def _series(X) -> np.ndarray:
    x = np.asarray(X, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise ValueError("X must be a one-dimensional series "
                         "(or a single-column matrix)")
    return x


class TelegraphRateEstimator(BaseEstimator):
    """Switching-rate estimator for positions read on a regular grid.

    Parameters
    ----------
    method : one of 'score_root', 'argmax', 'least_squares'
    delta : grid step between consecutive observations
    speed : known speed of the motion
    rate_cap : search bound for the variance-matching method

    After fit: rate_ holds the point estimate and result_ the full
    diagnostics record (validity, convergence, search bounds).
    """

    def __init__(self, method: str = "score_root", delta: float = 1.0,
                 speed: float = 1.0, rate_cap: float = 3.0):
        self.method = method
        self.delta = delta
        self.speed = speed
        self.rate_cap = rate_cap

    def fit(self, X, y=None):
        if self.method not in _RATE_METHODS:
            raise ValueError(f"method must be one of {_RATE_METHODS}, "
                             f"got {self.method!r}")
        sample = GridSample(_series(X), self.delta, self.speed)
        opts = EstimatorOptions(rate_cap=self.rate_cap)
        if self.method == "least_squares":
            result = lambda_least_squares(sample, opts)
        elif self.method == "argmax":
            result = lambda_argmax(decompose(sample), opts)
        else:
            result = lambda_score_root(decompose(sample), opts)
        self.result_ = result
        self.rate_ = result.estimate
        self.n_increments_ = sample.n
        return self

    def score(self, X, y=None) -> float:
        """Mean per-increment log likelihood of X at the fitted rate."""
        check_is_fitted(self, "rate_")
        decomp = decompose(GridSample(_series(X), self.delta, self.speed))
        if not self.rate_ > 0.0:
            return float("-inf")
        return log_likelihood(self.rate_, decomp) / decomp.n


class GeometricTelegraphEstimator(BaseEstimator):
    """Volatility and switching rate from discretely observed prices.

    Needs the drift mu known; sigma comes from the mean log return and
    the rate from the centered return variance with sigma plugged in.
    After fit: sigma_, rate_, and the full records sigma_result_ and
    rate_result_ (an invalid sigma propagates to an invalid rate).
    """

    def __init__(self, mu: float = 0.0, delta: float = 1.0,
                 speed: float = 1.0, rate_cap: float = 3.0):
        self.mu = mu
        self.delta = delta
        self.speed = speed
        self.rate_cap = rate_cap

    def fit(self, X, y=None):
        prices = _series(X)
        if prices.size < 2:
            raise ValueError("need at least two prices")
        if np.any(prices <= 0.0):
            raise ValueError("prices must be positive")
        returns = LogReturns(np.diff(np.log(prices)), self.delta, self.mu)
        opts = EstimatorOptions(rate_cap=self.rate_cap)
        self.sigma_result_ = sigma_hat(returns)
        self.rate_result_ = lambda_dot(returns, self.sigma_result_,
                                       self.speed, opts)
        self.sigma_ = self.sigma_result_.estimate
        self.rate_ = self.rate_result_.estimate
        self.n_increments_ = returns.n
        return self
