"""Modified Bessel functions of the first kind, orders 0, 1 and 2.

Only the low integer orders that the telegraph likelihood needs are
implemented.  The exponentially scaled form ``exp(-x) * I_nu(x)`` is the
canonical one: every caller in this package composes densities and
likelihoods in log space from the scaled values, so the unscaled variant
exists mostly for direct evaluation and testing.

Evaluation strategy: the ascending power series (all terms positive, no
cancellation) below ``_SERIES_CUTOFF``, and above it the large-argument
expansion of ``exp(-x) * I_nu(x)`` in powers of ``1/x`` truncated at its
smallest term.  See ``tests/test_bessel.py`` for the extended-precision
checks that pin the crossover.
"""

from __future__ import annotations

import math

import numpy as np

ORDERS = (0, 1, 2)

# Crossover between the two evaluation branches.  The divergent tail of the
# large-argument expansion limits it to ~1e-15 relative error at x = 18;
# below that the power series is the accurate choice (it needs ~45 terms
# at the crossover and has no cancellation).
_SERIES_CUTOFF = 18.0

# Stop the ascending series once a term drops below this fraction of the
# running sum.
_TERM_EPS = 1e-17

# exp(x) overflows above this; unscaled values are +inf beyond it.
_EXP_OVERFLOW = 709.782712893384

_FACTORIAL = (1.0, 1.0, 2.0)


def _check_order(nu: int) -> int:
    if nu not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {nu!r}")
    return int(nu)


def _check_argument(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise ValueError("argument must be finite")
    if np.any(arr < 0.0):
        raise ValueError("argument must be nonnegative")
    return arr, scalar


def _series(nu: int, x: np.ndarray) -> np.ndarray:
    """Ascending series for I_nu(x); reliable for moderate x."""
    q = 0.25 * x * x
    term = (0.5 * x) ** nu / _FACTORIAL[nu]
    total = term.copy()
    for k in range(1, 200):
        term = term * (q / (k * (k + nu)))
        total += term
        if np.all(term <= _TERM_EPS * total):
            break
    return total


def _asymptotic_scaled(nu: int, x: np.ndarray) -> np.ndarray:
    """Large-argument expansion of exp(-x) I_nu(x), optimally truncated.

    Terms are c_k / x^k with c_k = prod_{j<=k} ((2j-1)^2 - 4 nu^2) / (k! 8^k).
    The series is divergent; each element stops just before its smallest
    term would start to grow again.
    """
    m4 = 4.0 * nu * nu
    total = np.ones_like(x)
    term = np.ones_like(x)
    frozen = np.zeros(x.shape, dtype=bool)
    for k in range(1, 80):
        nxt = term * (((2 * k - 1) ** 2 - m4) / (8.0 * k) / x)
        frozen |= np.abs(nxt) >= np.abs(term)
        np.add(total, np.where(frozen, 0.0, nxt), out=total)
        term = np.where(frozen, term, nxt)
        if np.all(frozen | (np.abs(term) <= 1e-18 * np.abs(total))):
            break
    return total / np.sqrt(2.0 * math.pi * x)


def bessel_i_scaled(nu: int, x):
    """Exponentially scaled modified Bessel function exp(-x) * I_nu(x).

    Parameters
    ----------
    nu : int
        Order, one of 0, 1, 2.
    x : float or array_like
        Nonnegative argument; any finite magnitude is safe (the scaled
        form never overflows and decays like 1/sqrt(x)).

    Returns
    -------
    float or ndarray
    """
    nu = _check_order(nu)
    arr, scalar = _check_argument(x)
    out = np.empty_like(arr)
    small = arr <= _SERIES_CUTOFF
    if np.any(small):
        xs = arr[small]
        out[small] = _series(nu, xs) * np.exp(-xs)
    if not np.all(small):
        out[~small] = _asymptotic_scaled(nu, arr[~small])
    return float(out[0]) if scalar else out


def bessel_i(nu: int, x):
    """Modified Bessel function of the first kind I_nu(x).

    Overflows to ``inf`` once exp(x) leaves double range (x beyond ~709.78);
    callers that need large arguments should use :func:`bessel_i_scaled`.
    """
    nu = _check_order(nu)
    arr, scalar = _check_argument(x)
    out = np.empty_like(arr)
    small = arr <= _SERIES_CUTOFF
    if np.any(small):
        out[small] = _series(nu, arr[small])
    if not np.all(small):
        xl = arr[~small]
        with np.errstate(over="ignore"):
            out[~small] = np.where(
                xl > _EXP_OVERFLOW, np.inf, _asymptotic_scaled(nu, xl) * np.exp(np.minimum(xl, _EXP_OVERFLOW))
            )
    return float(out[0]) if scalar else out
