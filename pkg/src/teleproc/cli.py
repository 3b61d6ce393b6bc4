"""Command line front end: simulate paths, estimate from files, run MC.

Exit codes: 0 success (including reports with valid=false entries),
2 configuration/usage error, 3 data error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import serialize
from .estimators import (
    METHODS,
    EstimatorOptions,
    LogReturns,
    lambda_argmax,
    lambda_dot,
    lambda_least_squares,
    lambda_oracle,
    lambda_score_root,
    sigma_hat,
)
from .likelihood import decompose
from .montecarlo import ExperimentSpec, run_experiment
from .process import (
    ConeViolationError,
    GridSample,
    ModelParams,
    replication_rng,
    sample_on_grid,
    simulate_path,
    to_geometric,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4

DEFAULT_SEED = 0
SEED_ENV = "TELEGRAPH_SEED"

_ESTIMATE_METHODS = ("score_root", "argmax", "least_squares", "sigma_hat", "lambda_dot")


class ConfigError(Exception):
    """A flag or environment value failed validation."""


class DataError(Exception):
    """The input data violates a model precondition."""


class IoError(Exception):
    """Reading or writing a file failed."""


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _positive(flag: str, value: float) -> None:
    _require(value > 0.0 and math.isfinite(value), f"{flag} must be positive, got {value!r}")


@contextmanager
def _open_out(path: str | None):
    """Yield (stream, to_file); map OS failures to I/O errors."""
    if path is None or path == "-":
        yield sys.stdout, False
        return
    try:
        f = open(path, "w", newline="")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from None
    try:
        with f:
            yield f, True
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from None


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", newline="") as f:
            return f.read()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="teleproc",
        description="Simulation and rate inference for telegraph processes "
                    "observed on a regular time grid.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="draw one path and write its grid sample")
    sim.add_argument("--lambda", dest="rate", type=float, required=True,
                     help="switching rate")
    sim.add_argument("--v", type=float, default=1.0, help="speed (default 1)")
    sim.add_argument("--T", type=float, required=True, help="time horizon")
    sim.add_argument("--n", type=int, required=True, help="number of grid increments")
    sim.add_argument("--sigma", type=float, default=None,
                     help="volatility; turns on the geometric price column")
    sim.add_argument("--mu", type=float, default=None, help="drift of the price model")
    sim.add_argument("--s0", type=float, default=1.0, help="start price (default 1)")
    sim.add_argument("--seed", type=int, default=None,
                     help=f"RNG seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    sim.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    sim.add_argument("--out", default=None, help="output file (default: stdout)")

    est = sub.add_parser("estimate", help="run estimators on a stored grid sample")
    est.add_argument("input", help="path file from simulate (csv or json), or - for stdin")
    est.add_argument("--v", type=float, default=1.0, help="known speed (default 1)")
    est.add_argument("--estimate-v", action="store_true",
                     help="read the speed off the largest increment instead of --v")
    est.add_argument("--mu", type=float, default=None,
                     help="drift, needed by sigma_hat/lambda_dot on price data")
    est.add_argument("--methods", nargs="+", default=None,
                     help="estimators to run (default: every applicable one)")
    est.add_argument("--lambda-cap", dest="rate_cap", type=float, default=3.0,
                     help="search cap for the variance-matching estimators")
    est.add_argument("--format", choices=("csv", "json", "table"), default="table")
    est.add_argument("--out", default=None, help="output file (default: stdout)")

    mc = sub.add_parser("mc", help="Monte Carlo bias/rmse study over a parameter grid")
    mc.add_argument("--lambda-grid", dest="rate_grid", nargs="+", type=float,
                    required=True, help="rates to study")
    mc.add_argument("--n-grid", dest="n_grid", nargs="+", type=int, required=True,
                    help="grid sizes to resample each path at")
    mc.add_argument("--T", type=float, default=500.0, help="time horizon (default 500)")
    mc.add_argument("--v", type=float, default=1.0, help="speed (default 1)")
    mc.add_argument("--N", type=int, required=True, help="number of replications")
    mc.add_argument("--methods", nargs="+", default=["score_root"],
                    help="method tags (default: score_root)")
    mc.add_argument("--sigma", type=float, default=None,
                    help="volatility for the geometric methods")
    mc.add_argument("--mu", type=float, default=None,
                    help="drift for the geometric methods")
    mc.add_argument("--s0", type=float, default=1.0, help="start price (default 1)")
    mc.add_argument("--lambda-cap", dest="rate_cap", type=float, default=3.0,
                    help="search cap for the variance-matching estimators")
    mc.add_argument("--seed", type=int, default=None,
                    help=f"RNG seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    mc.add_argument("--jobs", type=int, default=None,
                    help="worker processes (default: all cores)")
    mc.add_argument("--format", choices=("csv", "json", "table"), default="csv")
    mc.add_argument("--table", dest="format", action="store_const", const="table",
                    help="shorthand for --format table")
    mc.add_argument("--out", default=None, help="summary file (default: stdout)")
    mc.add_argument("--replications-out", default=None,
                    help="also dump one CSV row per replication here")
    return p


# -- simulate -------------------------------------------------------------

def _build_params(args) -> ModelParams:
    _positive("--lambda", args.rate)
    _positive("--v", args.v)
    if args.sigma is None:
        _require(args.mu is None,
                 "--mu is only meaningful together with --sigma")
        return ModelParams(rate=args.rate, speed=args.v)
    _positive("--sigma", args.sigma)
    _require(args.mu is not None, "--sigma requires --mu (the price drift)")
    _require(math.isfinite(args.mu), f"--mu must be finite, got {args.mu!r}")
    _positive("--s0", args.s0)
    return ModelParams(rate=args.rate, speed=args.v, drift=args.mu,
                       volatility=args.sigma, start_price=args.s0)


def cmd_simulate(args) -> int:
    params = _build_params(args)
    _positive("--T", args.T)
    _require(args.n >= 1, f"--n must be at least 1, got {args.n}")
    seed = _resolve_seed(args.seed)

    path = simulate_path(params, args.T, replication_rng(seed))
    sample = sample_on_grid(path, args.n)
    geometric = to_geometric(sample, params) if params.has_price_model else None

    with _open_out(args.out) as (f, to_file):
        if args.format == "csv":
            serialize.write_path_csv(f, sample, geometric)
        elif args.format == "json":
            serialize.write_path_json(f, sample, geometric)
        else:
            f.write(serialize.render_path_table(sample, geometric))
    # keep stdout parseable when the sample itself goes there
    info = sys.stdout if args.out not in (None, "-") else sys.stderr
    print(f"N(T) = {path.switch_count}", file=info)
    print(f"lambda_oracle = {lambda_oracle(path)!r}", file=info)
    return EXIT_OK


# -- estimate -------------------------------------------------------------

def _grid_from_path_data(data, speed: float) -> GridSample:
    t = data.t
    n = t.size - 1
    delta = (t[-1] - t[0]) / n
    if not delta > 0.0:
        raise DataError("time column must be increasing")
    drift_off = np.max(np.abs(t - t[0] - delta * np.arange(n + 1)))
    if drift_off > 1e-6 * max(delta, 1.0):
        raise DataError("time column is not an equidistant grid")
    if data.x[0] != 0.0:
        raise DataError("x must start at 0 (simulate output schema)")
    try:
        return GridSample(data.x, float(delta), speed)
    except ConeViolationError as e:
        raise DataError(
            f"data row {e.index + 1} (counting the t=0 row as row 0): "
            f"increment leaves the reachable cone |dx| <= v*delta"
        ) from None


def cmd_estimate(args) -> int:
    _positive("--v", args.v)
    _positive("--lambda-cap", args.rate_cap)
    if args.mu is not None:
        _require(math.isfinite(args.mu), f"--mu must be finite, got {args.mu!r}")

    try:
        data = serialize.read_path_auto(io.StringIO(_read_text(args.input)))
    except ValueError as e:
        raise DataError(str(e)) from None

    has_prices = data.s is not None
    if args.methods is None:
        methods = ["score_root", "argmax", "least_squares"]
        if has_prices and args.mu is not None:
            methods += ["sigma_hat", "lambda_dot"]
    else:
        methods = list(args.methods)
        unknown = [m for m in methods if m not in METHODS]
        _require(not unknown, f"--methods: unknown method tags {unknown}")
        _require("oracle" not in methods,
                 "--methods: oracle needs the continuous path, "
                 "which grid files do not carry")
        needs_prices = [m for m in methods if m in ("sigma_hat", "lambda_dot")]
        _require(not needs_prices or has_prices,
                 f"--methods: {needs_prices} need a price column (s) in the input")
        _require(not needs_prices or args.mu is not None,
                 f"--methods: {needs_prices} need --mu (the price drift)")

    if args.estimate_v:
        dx = np.abs(np.diff(data.x))
        top = float(np.max(dx))
        _require(top > 0.0, "--estimate-v: all increments are zero; no speed scale")
        n = data.t.size - 1
        speed = float(top / ((data.t[-1] - data.t[0]) / n))
    else:
        speed = args.v
    sample = _grid_from_path_data(data, speed)

    if data.s is not None and np.any(np.asarray(data.s) <= 0.0):
        raise DataError("price column must be positive")

    opts = EstimatorOptions(rate_cap=args.rate_cap)
    decomp = None
    returns = None
    sigma_result = None
    results = []
    for method in methods:
        if method in ("score_root", "argmax"):
            if decomp is None:
                decomp = decompose(sample)
            fit = lambda_score_root if method == "score_root" else lambda_argmax
            results.append(fit(decomp, opts))
        elif method == "least_squares":
            results.append(lambda_least_squares(sample, opts))
        else:
            if returns is None:
                returns = LogReturns(np.diff(np.log(data.s)), sample.delta, args.mu)
            if sigma_result is None:
                sigma_result = sigma_hat(returns)
            if method == "sigma_hat":
                results.append(sigma_result)
            else:
                results.append(lambda_dot(returns, sigma_result, speed, opts))

    with _open_out(args.out) as (f, to_file):
        if args.format == "csv":
            serialize.write_results_csv(f, results)
        elif args.format == "json":
            serialize.write_results_json(f, results)
        else:
            f.write(serialize.render_results_table(results))
    if args.estimate_v:
        info = sys.stdout if args.out not in (None, "-") else sys.stderr
        print(f"v_hat = {speed!r}", file=info)
    return EXIT_OK


# -- mc -------------------------------------------------------------------

def cmd_mc(args) -> int:
    for r in args.rate_grid:
        _positive("--lambda-grid", r)
    for n in args.n_grid:
        _require(n >= 1, f"--n-grid entries must be at least 1, got {n}")
    _positive("--T", args.T)
    _positive("--v", args.v)
    _require(args.N >= 1, f"--N must be at least 1, got {args.N}")
    _positive("--lambda-cap", args.rate_cap)
    unknown = [m for m in args.methods if m not in METHODS]
    _require(not unknown, f"--methods: unknown method tags {unknown}")
    geometric = {m for m in args.methods if m in ("sigma_hat", "lambda_dot")}
    _require(not geometric or (args.sigma is not None and args.mu is not None),
             f"--methods: {sorted(geometric)} need --sigma and --mu")
    if args.sigma is not None:
        _positive("--sigma", args.sigma)
        _positive("--s0", args.s0)
    seed = _resolve_seed(args.seed)
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    _require(jobs >= 1, f"--jobs must be at least 1, got {jobs}")

    spec = ExperimentSpec(
        rates=tuple(args.rate_grid),
        grid_sizes=tuple(args.n_grid),
        horizon=args.T,
        speed=args.v,
        replications=args.N,
        seed=seed,
        methods=tuple(args.methods),
        options=EstimatorOptions(rate_cap=args.rate_cap),
        drift=args.mu,
        volatility=args.sigma,
        start_price=args.s0,
    )
    if args.replications_out:
        summaries, rows = run_experiment(spec, jobs=jobs, return_replications=True)
        with _open_out(args.replications_out) as (f, _):
            serialize.write_replications_csv(f, rows)
    else:
        summaries = run_experiment(spec, jobs=jobs)

    with _open_out(args.out) as (f, _):
        if args.format == "csv":
            serialize.write_summary_csv(f, summaries)
        elif args.format == "json":
            serialize.write_summary_json(f, summaries)
        else:
            f.write(serialize.render_summary_table(summaries))
    return EXIT_OK


_COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate, "mc": cmd_mc}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except IoError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
