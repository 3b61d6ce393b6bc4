"""Step-transition density and likelihood for grid-sampled telegraph data.

The position transition over an interval of length t splits into two point
masses of weight exp(-rate*t)/2 at the reachable extremes +-speed*t and an
absolutely continuous part supported strictly inside.  Everything here is
written against the scaled Bessel functions so that exp(z) never appears:
the density carries exp(z - rate*t) with z <= rate*t, which lives in (0, 1].

Increment classification (boundary vs interior) uses the relative slack
u = (speed*delta)^2 - dx^2 against CLASSIFY_TOL once, up front; the split
does not depend on the rate, so it is shared by every likelihood and score
evaluation during a fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_i_scaled
from .process import CLASSIFY_TOL, GridSample

_LOG2 = math.log(2.0)

# below this z the ratio I1(z)/sqrt(u) switches to its ascending series
_SLOPE_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class DensityValue:
    """Transition density split into its continuous and atomic parts."""

    continuous: np.ndarray | float
    atom_mass: float
    atom_positions: tuple[float, float]

    def total_mass(self, displacements: np.ndarray) -> float:
        """Trapezoid mass of the continuous part plus both atoms.

        Only meaningful when `continuous` was evaluated on the sorted grid
        `displacements`; handy for quick normalisation checks.
        """
        return float(np.trapezoid(self.continuous, displacements)) + 2.0 * self.atom_mass


def transition_density(
    displacement: np.ndarray | float,
    elapsed: float,
    rate: float,
    speed: float,
) -> DensityValue:
    """Density of the position change over `elapsed` time from a fresh start.

    The continuous part is zero outside the open reachable interval; the
    boundary points carry the atoms instead.
    """
    if not (elapsed > 0.0) or not (rate > 0.0) or not (speed > 0.0):
        raise ValueError("elapsed, rate and speed must be positive")
    x = np.asarray(displacement, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    reach = speed * elapsed
    out = np.zeros_like(x)
    inside = np.abs(x) < reach
    if np.any(inside):
        u = reach * reach - x[inside] ** 2
        root_u = np.sqrt(u)
        z = rate * root_u / speed
        i0e = bessel_i_scaled(0, z)
        bracket = i0e + speed * elapsed * _scaled_slope(rate, speed, u, z)
        out[inside] = (rate / (2.0 * speed)) * np.exp(z - rate * elapsed) * bracket
    atom = 0.5 * math.exp(-rate * elapsed)
    cont = float(out[0]) if scalar else out
    return DensityValue(cont, atom, (-reach, reach))


@dataclass(frozen=True)
class IncrementDecomposition:
    """Grid increments split into boundary and interior groups.

    `slack` holds u_i = (speed*delta)^2 - dx_i^2 for every increment,
    clipped to zero where the increment is classified as boundary.
    """

    delta: float
    speed: float
    interior: np.ndarray
    slack: np.ndarray

    def __post_init__(self):
        if self.interior.shape != self.slack.shape or self.interior.ndim != 1:
            raise ValueError("interior and slack must be matching 1-d arrays")

    @property
    def n(self) -> int:
        return self.interior.size

    @property
    def n_interior(self) -> int:
        return int(np.sum(self.interior))

    @property
    def interior_slack(self) -> np.ndarray:
        return self.slack[self.interior]


def decompose(sample: GridSample) -> IncrementDecomposition:
    """Classify each grid increment of `sample` as boundary or interior."""
    dx = np.diff(sample.values)
    bound = sample.speed * sample.delta
    slack = bound * bound - dx * dx
    interior = slack > CLASSIFY_TOL * bound * bound
    slack = np.where(interior, slack, 0.0)
    return IncrementDecomposition(sample.delta, sample.speed, interior, slack)


def _scaled_slope(rate: float, speed: float, u: np.ndarray, z: np.ndarray) -> np.ndarray:
    """exp(-z) * I1(z) / sqrt(u) with z = rate*sqrt(u)/speed, u > 0.

    For tiny z the direct quotient is replaced by the ascending series of
    I1(z)/sqrt(u) = (rate/(2*speed)) * (1 + z^2/8 + z^4/192 + ...), which
    stays exact as u approaches the classification threshold.
    """
    small = z < _SLOPE_SERIES_CUTOFF
    out = np.empty_like(u)
    if np.any(small):
        zs = z[small]
        out[small] = (
            (rate / (2.0 * speed)) * (1.0 + zs * zs / 8.0) * np.exp(-zs)
        )
    big = ~small
    if np.any(big):
        out[big] = bessel_i_scaled(1, z[big]) / np.sqrt(u[big])
    return out


def _interior_parts(rate, decomp):
    u = decomp.interior_slack
    root_u = np.sqrt(u)
    z = rate * root_u / decomp.speed
    i0e = bessel_i_scaled(0, z)
    s1e = _scaled_slope(rate, decomp.speed, u, z)
    return u, root_u, z, i0e, s1e


def log_likelihood(rate: float, decomp: IncrementDecomposition) -> float:
    """Exact log-likelihood of the step transitions at the given rate."""
    if not (rate > 0.0) or not math.isfinite(rate):
        raise ValueError("rate must be positive and finite")
    n = decomp.n
    delta, speed = decomp.delta, decomp.speed
    total = -rate * n * delta - n * _LOG2 - decomp.n_interior * math.log(speed)
    if decomp.n_interior:
        _, _, z, i0e, s1e = _interior_parts(rate, decomp)
        total += float(
            np.sum(z + math.log(rate) + np.log(i0e + speed * delta * s1e))
        )
    return total


def score(rate: float, decomp: IncrementDecomposition) -> float:
    """Derivative of `log_likelihood` in the rate.

    Uses the two-term form obtained after collapsing the order-2 Bessel
    contribution through I0 - I2 = (2/z) I1; see `score_expanded` for the
    uncollapsed version kept around as a cross-check.
    """
    if not (rate > 0.0) or not math.isfinite(rate):
        raise ValueError("rate must be positive and finite")
    delta, speed = decomp.delta, decomp.speed
    total = -decomp.n * delta
    if decomp.n_interior:
        u, _, _, i0e, s1e = _interior_parts(rate, decomp)
        num = speed * (1.0 + delta * rate) * i0e + rate * u * s1e
        den = speed * rate * (i0e + speed * delta * s1e)
        total += float(np.sum(num / den))
    return total


def score_expanded(rate: float, decomp: IncrementDecomposition) -> float:
    """Same derivative, written with all three Bessel orders spelled out."""
    if not (rate > 0.0) or not math.isfinite(rate):
        raise ValueError("rate must be positive and finite")
    delta, speed = decomp.delta, decomp.speed
    total = -decomp.n * delta
    if decomp.n_interior:
        u, root_u, z, i0e, s1e = _interior_parts(rate, decomp)
        i1e = bessel_i_scaled(1, z)
        i2e = bessel_i_scaled(2, z)
        num = (
            i0e * (1.0 + 0.5 * rate * delta)
            + (rate / speed) * root_u * i1e
            + speed * delta * s1e
            + 0.5 * rate * delta * i2e
        )
        den = rate * (i0e + speed * delta * s1e)
        total += float(np.sum(num / den))
    return total
