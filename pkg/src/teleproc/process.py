"""Telegraph process model types, exact simulation, and grid sampling.

A telegraph path moves at speed ``v`` and flips direction at the events
of a Poisson process with rate ``lambda``; it is represented exactly by
its initial direction and event times, so there is no discretisation
error anywhere in the simulator.  The geometric variant exponentiates
the path with a drift and volatility on top.

Positions handed to the estimators are read off a regular grid of step
``delta = horizon / n``.  Increments that contain no event are laid down
as the exact product ``sign * v * delta`` so that downstream
classification (at-speed versus reflected) sees them sitting on the cone
boundary up to one rounding of the running sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Relative tolerance on u / (v*delta)^2 used to split grid increments into
# "no switch" (on the cone boundary) and "at least one switch" (strictly
# inside).  Orders of magnitude above accumulated roundoff, orders below
# any plausible switch signal.
CLASSIFY_TOL = 1e-9


class ConeViolationError(ValueError):
    """An observed increment moved faster than the model speed allows."""

    def __init__(self, index: int, message: str):
        super().__init__(message)
        self.index = index


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Telegraph parameters, plus the optional price-model layer.

    ``rate`` is the Poisson switch intensity, ``speed`` the constant
    velocity magnitude.  ``drift``, ``volatility`` and ``start_price``
    only matter for the geometric process and may be left unset.
    """

    rate: float
    speed: float
    drift: float | None = None
    volatility: float | None = None
    start_price: float | None = None

    def __post_init__(self):
        _require_positive("rate", self.rate)
        _require_positive("speed", self.speed)
        if self.volatility is not None:
            _require_positive("volatility", self.volatility)
        if self.start_price is not None:
            _require_positive("start_price", self.start_price)
        if self.drift is not None and not math.isfinite(float(self.drift)):
            raise ValueError("drift must be finite")

    @property
    def has_price_model(self) -> bool:
        return (
            self.drift is not None
            and self.volatility is not None
            and self.start_price is not None
        )

    @property
    def log_drift(self) -> float:
        """Drift of the log price: drift - volatility^2 / 2."""
        if self.drift is None or self.volatility is None:
            raise ValueError("drift and volatility must be set")
        return float(self.drift) - 0.5 * float(self.volatility) ** 2

    def require_price_model(self) -> None:
        if not self.has_price_model:
            raise ValueError("drift, volatility and start_price must all be set")


@dataclass(frozen=True, eq=False)
class TelegraphPath:
    """Exact path representation: initial direction plus switch times."""

    initial_sign: int
    event_times: np.ndarray
    horizon: float
    speed: float

    def __post_init__(self):
        if self.initial_sign not in (-1, 1):
            raise ValueError("initial_sign must be -1 or +1")
        _require_positive("horizon", self.horizon)
        _require_positive("speed", self.speed)
        e = np.asarray(self.event_times, dtype=float)
        object.__setattr__(self, "event_times", e)
        if e.ndim != 1:
            raise ValueError("event_times must be one-dimensional")
        if e.size:
            if not np.all(np.isfinite(e)):
                raise ValueError("event_times must be finite")
            if e[0] <= 0.0 or e[-1] > self.horizon or np.any(np.diff(e) <= 0.0):
                raise ValueError("event_times must be strictly increasing in (0, horizon]")

    @property
    def switch_count(self) -> int:
        return int(self.event_times.size)


@dataclass(frozen=True, eq=False)
class GridSample:
    """Positions of a telegraph path on the regular grid i * delta."""

    values: np.ndarray
    delta: float
    speed: float

    def __post_init__(self):
        _require_positive("delta", self.delta)
        _require_positive("speed", self.speed)
        x = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", x)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("values must be one-dimensional with at least two points")
        if not np.all(np.isfinite(x)):
            raise ValueError("values must be finite")
        if x[0] != 0.0:
            raise ValueError("values must start at 0")
        bound = self.speed * self.delta
        bad = np.flatnonzero(np.abs(np.diff(x)) > bound * (1.0 + CLASSIFY_TOL))
        if bad.size:
            i = int(bad[0])
            raise ConeViolationError(
                i,
                f"increment {i} has |dx| = {abs(x[i + 1] - x[i])!r} exceeding "
                f"speed * delta = {bound!r}",
            )

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def horizon(self) -> float:
        return self.n * self.delta


@dataclass(frozen=True, eq=False)
class GeometricGridSample:
    """Geometric telegraph prices on the regular grid, start price first."""

    prices: np.ndarray
    delta: float
    params: ModelParams

    def __post_init__(self):
        _require_positive("delta", self.delta)
        self.params.require_price_model()
        s = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", s)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("prices must be one-dimensional with at least two points")
        if not np.all(np.isfinite(s)) or np.any(s <= 0.0):
            raise ValueError("prices must be positive and finite")

    @property
    def n(self) -> int:
        return self.prices.size - 1


def replication_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent, reproducible stream for one unit of Monte Carlo work.

    Streams are derived by spawn key, so (seed, key) fully determines the
    draw sequence no matter how work is scheduled across processes.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(key)))


def simulate_path(
    params: ModelParams, horizon: float, rng: np.random.Generator | int | None = None
) -> TelegraphPath:
    """Draw a telegraph path exactly: fair initial direction, Poisson switches."""
    horizon = _require_positive("horizon", horizon)
    rng = np.random.default_rng(rng)
    sign = 1 if rng.random() < 0.5 else -1
    scale = 1.0 / params.rate
    expected = params.rate * horizon
    chunk = max(16, int(expected + 4.0 * math.sqrt(expected) + 4.0))
    times = np.cumsum(rng.exponential(scale, size=chunk))
    while times[-1] <= horizon:
        more = np.cumsum(rng.exponential(scale, size=chunk)) + times[-1]
        times = np.concatenate((times, more))
    events = times[times <= horizon]
    return TelegraphPath(sign, events, horizon, params.speed)


def _signed_time_prefix(path: TelegraphPath):
    """Breakpoints, signed elapsed-time prefix at each event, and the
    direction sign in force after each event."""
    e = path.event_times
    m = e.size
    sign_after = path.initial_sign * (-1.0) ** np.arange(m + 1)
    gaps = np.diff(np.concatenate(([0.0], e)))
    prefix = np.concatenate(([0.0], np.cumsum(sign_after[:m] * gaps)))
    return e, prefix, sign_after


def eval_path(path: TelegraphPath, t: float) -> float:
    """Position at an arbitrary time, evaluated from the exact events."""
    t = float(t)
    if not 0.0 <= t <= path.horizon:
        raise ValueError(f"t must lie in [0, {path.horizon}], got {t}")
    e, prefix, sign_after = _signed_time_prefix(path)
    j = int(np.searchsorted(e, t, side="right"))
    t0 = 0.0 if j == 0 else float(e[j - 1])
    return path.speed * (prefix[j] + sign_after[j] * (t - t0))


def sample_on_grid(path: TelegraphPath, n: int) -> GridSample:
    """Read the path on the grid i * horizon / n, i = 0..n.

    Increment i covers (t_{i-1}, t_i].  Event-free increments are laid
    down as the exact product sign * speed * delta before the running sum
    is formed, so they land on the cone boundary as tightly as a stored
    float sequence allows.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    delta = path.horizon / n
    t = np.arange(n + 1) * delta
    t[-1] = path.horizon
    e, prefix, sign_after = _signed_time_prefix(path)
    k = np.searchsorted(e, t, side="right")
    t_last_event = np.concatenate(([0.0], e))[k]
    signed_time = prefix[k] + sign_after[k] * (t - t_last_event)
    dx = path.speed * np.diff(signed_time)
    empty = k[1:] == k[:-1]
    dx[empty] = sign_after[k[:-1][empty]] * (path.speed * delta)
    values = np.concatenate(([0.0], np.cumsum(dx)))
    return GridSample(values, delta, path.speed)


def to_geometric(sample: GridSample, params: ModelParams) -> GeometricGridSample:
    """Exponentiate a sampled telegraph path into geometric prices."""
    params.require_price_model()
    if params.speed != sample.speed:
        raise ValueError("params.speed does not match the sampled path speed")
    n = sample.n
    t = np.arange(n + 1) * sample.delta
    t[-1] = sample.horizon
    exponent = params.log_drift * t + float(params.volatility) * sample.values
    prices = float(params.start_price) * np.exp(exponent)
    return GeometricGridSample(prices, sample.delta, params)


def displacement_mean(rate: float, speed: float, t: float) -> float:
    """Mean position at time t; zero by the symmetric initial direction."""
    _require_positive("rate", rate)
    _require_positive("speed", speed)
    return 0.0


def displacement_variance(rate: float, speed: float, t: float) -> float:
    """Variance of the position at time t.

    Equals (speed^2 / rate) * (t - (1 - exp(-2 rate t)) / (2 rate)) with
    the continuous limit speed^2 t^2 as rate -> 0; the small rate*t branch
    is evaluated by series to keep full relative accuracy through the
    cancellation.
    """
    rate = float(rate)
    speed = _require_positive("speed", speed)
    t = float(t)
    if rate < 0.0 or not math.isfinite(rate):
        raise ValueError("rate must be nonnegative and finite")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 0.0
    u = 2.0 * rate * t
    if u == 0.0:
        return speed * speed * t * t
    if u < 1e-3:
        # (1/u) * (u + exp(-u) - 1) = u/2 - u^2/6 + u^3/24 - u^4/120 + ...
        g = u * (0.5 + u * (-1.0 / 6.0 + u * (1.0 / 24.0 + u * (-1.0 / 120.0 + u / 720.0))))
    else:
        g = 1.0 + math.expm1(-u) / u
    return (speed * speed / rate) * t * g
