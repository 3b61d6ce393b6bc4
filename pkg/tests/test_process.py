"""Simulation and sampling invariants for the telegraph process."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from teleproc.process import (
    CLASSIFY_TOL,
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


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(rate=0.0, speed=1.0)
    with pytest.raises(ValueError):
        ModelParams(rate=1.0, speed=-2.0)
    with pytest.raises(ValueError):
        ModelParams(rate=1.0, speed=1.0, volatility=0.0)
    with pytest.raises(ValueError):
        ModelParams(rate=math.inf, speed=1.0)
    p = ModelParams(rate=0.5, speed=1.0, drift=1.0, volatility=0.5, start_price=1.0)
    assert p.has_price_model
    assert p.log_drift == pytest.approx(1.0 - 0.125)
    assert not ModelParams(rate=0.5, speed=1.0).has_price_model


def test_path_validation():
    with pytest.raises(ValueError):
        TelegraphPath(0, np.array([1.0]), 10.0, 1.0)
    with pytest.raises(ValueError):
        TelegraphPath(1, np.array([2.0, 1.0]), 10.0, 1.0)
    with pytest.raises(ValueError):
        TelegraphPath(1, np.array([11.0]), 10.0, 1.0)
    with pytest.raises(ValueError):
        TelegraphPath(1, np.array([-1.0]), 10.0, 1.0)


def test_no_event_path_grid_is_exact():
    path = TelegraphPath(1, np.array([]), 5.0, 1.0)
    grid = sample_on_grid(path, 5)
    assert grid.values.tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    path = TelegraphPath(-1, np.array([]), 5.0, 1.0)
    assert sample_on_grid(path, 5).values.tolist() == [0.0, -1.0, -2.0, -3.0, -4.0, -5.0]


def test_eval_path_piecewise_linear():
    # +1 start, switch at 1.0 and 3.0, speed 2
    path = TelegraphPath(1, np.array([1.0, 3.0]), 4.0, 2.0)
    assert eval_path(path, 0.0) == 0.0
    assert eval_path(path, 0.5) == pytest.approx(1.0)
    assert eval_path(path, 1.0) == pytest.approx(2.0)
    assert eval_path(path, 2.0) == pytest.approx(0.0)
    assert eval_path(path, 3.0) == pytest.approx(-2.0)
    assert eval_path(path, 4.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        eval_path(path, 4.5)
    with pytest.raises(ValueError):
        eval_path(path, -0.1)


def test_grid_agrees_with_pointwise_evaluation():
    params = ModelParams(rate=0.8, speed=1.3)
    path = simulate_path(params, 50.0, rng=7)
    grid = sample_on_grid(path, 37)
    delta = 50.0 / 37
    for i in (0, 1, 5, 17, 36, 37):
        t = min(i * delta, 50.0)
        assert grid.values[i] == pytest.approx(eval_path(path, t), abs=1e-9)


def test_simulation_is_deterministic_per_seed():
    params = ModelParams(rate=1.0, speed=1.0)
    a = simulate_path(params, 100.0, rng=np.random.default_rng(123))
    b = simulate_path(params, 100.0, rng=np.random.default_rng(123))
    assert a.initial_sign == b.initial_sign
    assert np.array_equal(a.event_times, b.event_times)
    c = simulate_path(params, 100.0, rng=np.random.default_rng(124))
    assert not np.array_equal(a.event_times, c.event_times)


def test_replication_streams_are_stable_and_distinct():
    a = replication_rng(42, 3, 7).random(4)
    b = replication_rng(42, 3, 7).random(4)
    c = replication_rng(42, 3, 8).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_position_stays_inside_cone():
    params = ModelParams(rate=2.0, speed=0.7)
    for seed in range(5):
        path = simulate_path(params, 20.0, rng=seed)
        for t in np.linspace(0.0, 20.0, 23):
            assert abs(eval_path(path, t)) <= 0.7 * t * (1 + 1e-12) + 1e-15


def test_grid_cone_and_empty_increment_classification():
    params = ModelParams(rate=1.0, speed=1.0)
    for seed in (0, 1, 2, 3):
        path = simulate_path(params, 200.0, rng=seed)
        for n in (40, 200, 1333):
            grid = sample_on_grid(path, n)
            assert grid.values[0] == 0.0
            dx = np.diff(grid.values)
            bound = grid.speed * grid.delta
            assert np.all(np.abs(dx) <= bound * (1 + CLASSIFY_TOL))
            u_rel = 1.0 - (dx / bound) ** 2
            t_edges = np.arange(n + 1) * grid.delta
            t_edges[-1] = path.horizon
            counts = np.diff(np.searchsorted(path.event_times, t_edges, side="right"))
            # increments without events must sit on the boundary ...
            assert np.all(u_rel[counts == 0] <= CLASSIFY_TOL)
            # ... and every increment flagged interior must hold an event
            assert np.all(counts[u_rel > CLASSIFY_TOL] >= 1)


def test_mean_event_count_matches_rate():
    params = ModelParams(rate=1.0, speed=1.0)
    reps = 10_000
    rng = np.random.default_rng(2026)
    counts = np.fromiter(
        (simulate_path(params, 500.0, rng=rng).switch_count for _ in range(reps)),
        dtype=float,
        count=reps,
    )
    se = math.sqrt(500.0 / reps)
    assert abs(counts.mean() - 500.0) <= 3 * se


def test_boundary_atoms_have_half_exponential_mass():
    # P(X(t) = +vt) = P(X(t) = -vt) = exp(-rate*t)/2
    params = ModelParams(rate=1.0, speed=1.0)
    reps = 20_000
    rng = np.random.default_rng(99)
    hi = lo = 0
    for _ in range(reps):
        path = simulate_path(params, 1.0, rng=rng)
        if path.switch_count == 0:
            if path.initial_sign > 0:
                hi += 1
            else:
                lo += 1
    p = 0.5 * math.exp(-1.0)
    se = math.sqrt(p * (1 - p) / reps)
    assert abs(hi / reps - p) <= 3 * se
    assert abs(lo / reps - p) <= 3 * se


def test_sample_moments_match_formulas():
    params = ModelParams(rate=1.0, speed=1.0)
    reps = 20_000
    rng = np.random.default_rng(5)
    x = np.fromiter(
        (eval_path(simulate_path(params, 1.0, rng=rng), 1.0) for _ in range(reps)),
        dtype=float,
        count=reps,
    )
    assert displacement_mean(1.0, 1.0, 1.0) == 0.0
    target = displacement_variance(1.0, 1.0, 1.0)
    assert abs(x.mean()) <= 3 * x.std() / math.sqrt(reps)
    var = (x * x).mean()  # mean is exactly zero in the model
    se_var = (x * x).std() / math.sqrt(reps)
    assert abs(var - target) <= 3 * se_var


def test_displacement_variance_values():
    assert displacement_variance(1.0, 1.0, 1.0) == pytest.approx(
        0.5676676416183064, rel=1e-15
    )
    # continuous limit: speed^2 * t^2
    assert displacement_variance(0.0, 1.0, 2.0) == 4.0
    assert displacement_variance(1e-12, 1.0, 2.0) == pytest.approx(4.0, rel=1e-11)
    # series and direct branches agree at the seam
    lo, hi = 4.999e-4, 5.001e-4  # rate*t just around u = 1e-3
    assert displacement_variance(lo, 1.0, 1.0) == pytest.approx(
        displacement_variance(hi, 1.0, 1.0), rel=1e-6
    )
    assert displacement_variance(1.0, 1.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        displacement_variance(-1.0, 1.0, 1.0)


def test_switch_fraction_on_grid():
    # fraction of increments holding >= 1 switch ~ 1 - exp(-rate*delta)
    params = ModelParams(rate=0.5, speed=1.0)
    rng = np.random.default_rng(17)
    total = interior = 0
    for _ in range(200):
        grid = sample_on_grid(simulate_path(params, 500.0, rng=rng), 500)
        dx = np.diff(grid.values)
        u_rel = 1.0 - (dx / (grid.speed * grid.delta)) ** 2
        interior += int(np.sum(u_rel > CLASSIFY_TOL))
        total += grid.n
    p = 1.0 - math.exp(-0.5)
    se = math.sqrt(p * (1 - p) / total)
    assert abs(interior / total - p) <= 3 * se


def test_grid_sample_validation():
    with pytest.raises(ValueError):
        GridSample(np.array([0.5, 1.0]), 1.0, 1.0)  # must start at zero
    with pytest.raises(ConeViolationError) as err:
        GridSample(np.array([0.0, 0.5, 2.0]), 1.0, 1.0)
    assert err.value.index == 1
    with pytest.raises(ValueError):
        GridSample(np.array([0.0]), 1.0, 1.0)
    g = GridSample(np.array([0.0, 0.5, 1.0]), 1.0, 1.0)
    assert g.n == 2
    assert g.horizon == 2.0


def test_to_geometric_log_return_identity():
    params = ModelParams(rate=0.5, speed=1.0, drift=1.0, volatility=0.5, start_price=2.0)
    path = simulate_path(params, 100.0, rng=11)
    grid = sample_on_grid(path, 100)
    geo = to_geometric(grid, params)
    assert isinstance(geo, GeometricGridSample)
    assert geo.prices[0] == pytest.approx(2.0)
    alpha = params.log_drift
    y = np.diff(np.log(geo.prices))
    expected = alpha * grid.delta + 0.5 * np.diff(grid.values)
    assert np.max(np.abs(y - expected)) < 1e-12


def test_to_geometric_requires_price_fields():
    params = ModelParams(rate=0.5, speed=1.0)
    grid = sample_on_grid(simulate_path(params, 10.0, rng=1), 10)
    with pytest.raises(ValueError):
        to_geometric(grid, params)


@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    rate=st.floats(min_value=0.05, max_value=5.0),
    speed=st.floats(min_value=0.1, max_value=4.0),
    n=st.integers(min_value=1, max_value=400),
)
@settings(max_examples=25, deadline=None)
def test_random_paths_yield_valid_grids(seed, rate, speed, n):
    params = ModelParams(rate=rate, speed=speed)
    path = simulate_path(params, 50.0, rng=seed)
    grid = sample_on_grid(path, n)  # constructor enforces cone and origin
    assert grid.n == n
    assert abs(grid.values[-1] - eval_path(path, path.horizon)) < 1e-8
