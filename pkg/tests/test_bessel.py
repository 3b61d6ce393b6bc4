"""Bessel kernel checks against the frozen extended-precision table.

tests/data/bessel_oracle.csv holds ascending-series values computed in
50-digit arithmetic (see tests/make_bessel_oracle.py); everything here is
measured against that table or against identities that hold exactly in
real arithmetic.
"""

import csv
import math
import pathlib

import numpy as np
import pytest
from hypothesis import given, strategies as st

from teleproc.bessel import ORDERS, bessel_i, bessel_i_scaled

DATA = pathlib.Path(__file__).parent / "data" / "bessel_oracle.csv"


def load_oracle():
    with DATA.open() as fh:
        rows = list(csv.DictReader(fh))
    x = np.array([float(r["x"]) for r in rows])
    vals = {nu: np.array([float(r[f"i{nu}"]) for r in rows]) for nu in ORDERS}
    return x, vals


@pytest.fixture(scope="module")
def oracle():
    return load_oracle()


def test_matches_oracle_table_to_1e13(oracle):
    x, vals = oracle
    for nu in ORDERS:
        mine = bessel_i(nu, x)
        rel = np.abs(mine - vals[nu]) / vals[nu]
        assert rel.max() < 1e-13, f"order {nu}: worst {rel.max():.3e} at x={x[rel.argmax()]}"


def test_scaled_matches_oracle_table(oracle):
    x, vals = oracle
    for nu in ORDERS:
        mine = bessel_i_scaled(nu, x)
        ref = vals[nu] * np.exp(-x)
        rel = np.abs(mine - ref) / ref
        # exp(-x) adds at most ~x ulp of its own; stay below the
        # unscaled budget anyway
        assert rel.max() < 1e-13


def test_frozen_spot_values():
    assert bessel_i(0, 1.0) == pytest.approx(1.2660658777520083356, rel=1e-14)
    assert bessel_i(1, 1.0) == pytest.approx(0.56515910399248502721, rel=1e-14)
    assert bessel_i(2, 1.0) == pytest.approx(0.13574766976703828118, rel=1e-14)
    assert bessel_i_scaled(0, 20.0) == pytest.approx(0.089780311884826021596, rel=1e-14)
    assert bessel_i_scaled(1, 20.0) == pytest.approx(0.087506222183288665356, rel=1e-14)
    assert bessel_i(0, 600.0) == pytest.approx(6.1463054039368448035e258, rel=1e-13)


def test_at_zero():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(2, 0.0) == 0.0
    assert bessel_i_scaled(0, 0.0) == 1.0


def test_small_argument_order_one_slope():
    # I1(k*u)/u -> k/2 as u -> 0
    for k in (0.5, 1.0, 3.0):
        for u in (1e-6, 1e-8):
            assert bessel_i(1, k * u) / u == pytest.approx(k / 2, rel=1e-9)


def test_recurrence_identity_on_grid():
    # I0(x) - I2(x) = (2/x) I1(x)
    x = np.linspace(1e-3, 50.0, 2001)
    lhs = bessel_i(0, x) - bessel_i(2, x)
    rhs = 2.0 / x * bessel_i(1, x)
    assert np.all(np.abs(lhs - rhs) <= 1e-11 * bessel_i(0, x))


def test_derivative_identity_central_difference():
    # d/dx I1(x) = (I0(x) + I2(x)) / 2
    for x in (0.5, 2.0, 10.0):
        h = 1e-6 * max(1.0, x)
        fd = (bessel_i(1, x + h) - bessel_i(1, x - h)) / (2 * h)
        assert fd == pytest.approx((bessel_i(0, x) + bessel_i(2, x)) / 2, rel=1e-6)


def test_ordering_and_positivity():
    for x in np.logspace(-6, 2.5, 40):
        i0, i1, i2 = (bessel_i(nu, x) for nu in ORDERS)
        assert i0 > i1 > i2 > 0.0


def test_scaled_range_and_consistency():
    for x in np.logspace(-8, 2.7, 50):
        s = bessel_i_scaled(0, x)
        assert 0.0 < s <= 1.0
        assert s * math.exp(x) == pytest.approx(bessel_i(0, x), rel=1e-12)


def test_scaled_never_overflows():
    for x in (700.0, 5e3, 1e8, 1e300):
        for nu in ORDERS:
            v = bessel_i_scaled(nu, x)
            assert np.isfinite(v) and v > 0.0


def test_unscaled_overflow_signals_inf():
    assert bessel_i(0, 800.0) == math.inf
    assert math.isfinite(bessel_i(0, 700.0))


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        bessel_i(3, 1.0)
    with pytest.raises(ValueError):
        bessel_i(0, -1.0)
    with pytest.raises(ValueError):
        bessel_i_scaled(1, math.nan)
    with pytest.raises(ValueError):
        bessel_i_scaled(1, math.inf)


@given(st.floats(min_value=1e-6, max_value=600.0), st.floats(min_value=1e-6, max_value=600.0))
def test_monotone_increasing(a, b):
    lo, hi = sorted((a, b))
    if lo == hi:
        return
    for nu in ORDERS:
        assert bessel_i_scaled(nu, hi) * math.exp(min(hi - lo, 700)) >= bessel_i_scaled(nu, lo)


@given(st.floats(min_value=1e-3, max_value=120.0))
def test_recurrence_property(x):
    lhs = bessel_i(0, x) - bessel_i(2, x)
    assert lhs == pytest.approx(2.0 / x * bessel_i(1, x), abs=1e-11 * bessel_i(0, x))


def test_vector_and_scalar_agree():
    xs = np.array([0.0, 0.3, 17.9, 18.1, 250.0])
    for nu in ORDERS:
        vec = bessel_i_scaled(nu, xs)
        assert vec.shape == xs.shape
        for i, x in enumerate(xs):
            assert vec[i] == bessel_i_scaled(nu, float(x))
