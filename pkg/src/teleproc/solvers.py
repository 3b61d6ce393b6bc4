"""Bracketed scalar root finding and maximisation.

Derivative-free building blocks for the rate estimators: a safeguarded
secant/bisection hybrid for roots and golden-section search for maxima.
Tolerances are absolute on the argument, which is how the estimators
quote their precision.  Both routines return (argument, evaluations) so
callers can report work done.
"""

from __future__ import annotations

import math

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def solve_root(f, lo, hi, f_lo=None, f_hi=None, tol=1e-10, max_iter=200):
    """Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.

    Secant proposals accelerate plain bisection, but every proposal is
    kept strictly inside the current bracket and two consecutive moves
    of the same endpoint force a bisection, so the bracket width is
    guaranteed to shrink to tol.
    """
    a, b = float(lo), float(hi)
    if not b > a:
        raise ValueError("need lo < hi")
    fa = float(f(a)) if f_lo is None else float(f_lo)
    fb = float(f(b)) if f_hi is None else float(f_hi)
    evals = (f_lo is None) + (f_hi is None)
    if fa == 0.0:
        return a, evals
    if fb == 0.0:
        return b, evals
    if fa * fb > 0.0:
        raise ValueError("f(lo) and f(hi) must differ in sign")
    streak = 0
    prev_side = 0
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if streak >= 2:
            x = 0.5 * (a + b)
        else:
            x = (a * fb - b * fa) / (fb - fa)
            if not (a < x < b):
                x = 0.5 * (a + b)
        fx = float(f(x))
        evals += 1
        if fx == 0.0:
            return x, evals
        if fa * fx < 0.0:
            b, fb = x, fx
            side = 1
        else:
            a, fa = x, fx
            side = -1
        streak = streak + 1 if side == prev_side else 1
        prev_side = side
    return 0.5 * (a + b), evals


def golden_section_max(f, lo, hi, tol=1e-10, max_iter=300):
    """Maximiser of a unimodal f on [lo, hi] to absolute tolerance tol."""
    a, b = float(lo), float(hi)
    if not b > a:
        raise ValueError("need lo < hi")
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = float(f(c)), float(f(d))
    evals = 2
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = float(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = float(f(d))
        evals += 1
    return 0.5 * (a + b), evals
