"""Command-line interface.

Usage::

    cutapprox cdf --alpha 4.7 --beta 0.3 --lambda 1000 --mu 1 --grid-q 0.01:0.99:50
    cutapprox sample --alpha 4.7 --beta 0.3 --lambda 1 --mu 1 --n 1000 --seed 42 --out z.csv
    cutapprox compare --alpha 4.7 --beta 0.3 --lambda 1 --mu 1 --n 100000
    cutapprox sweep --alpha 4.7 --beta 0.3 --mu 1 --ratios 0.1,1,10,100,1000

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure, 4 I/O error.
Set ``CUTAPPROX_THREADS`` to cap the worker count (0 = one per CPU).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import _io
from .analysis import CDF_COLUMNS, DEFAULT_RATIOS, cdf_table, compare, sweep
from .distributions import Scenario
from .errors import DomainError, QuadratureError
from .exact_cut import GridSpec, QuadratureConfig
from .monte_carlo import csv_bytes, sample_cut

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class ConfigError(Exception):
    pass


def _model_flags(parser, with_lambda=True):
    parser.add_argument("--alpha", type=float, help="Pareto shape")
    parser.add_argument("--beta", type=float, help="texture scale")
    if with_lambda:
        parser.add_argument("--lambda", dest="lam", type=float, help="reciprocal of target power")
    parser.add_argument("--mu", type=float, help="reciprocal of mean speckle intensity")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="-", help="output path ('-' for stdout)")
    parser.add_argument("--abs-tol", type=float, default=QuadratureConfig.abs_tol)
    parser.add_argument("--rel-tol", type=float, default=QuadratureConfig.rel_tol)
    parser.add_argument("--max-subdivisions", type=int, default=QuadratureConfig.max_subdivisions)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutapprox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cdf", help="exact and approximate CDFs on a grid")
    _model_flags(p)
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--grid-q", help="lo:hi:count, clutter-quantile spaced (default 0.01:0.99:50)")
    grid.add_argument("--grid-t", help="lo:hi:count, linear in t")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sample", help="Monte Carlo draws of the cell under test")
    _model_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json", "binary"), default="csv")

    p = sub.add_parser("compare", help="exact vs empirical vs approximations")
    _model_flags(p)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("sweep", help="approximation quality across lambda/mu")
    _model_flags(p, with_lambda=False)
    p.add_argument("--ratios", default=",".join(f"{r:g}" for r in DEFAULT_RATIOS),
                   help="comma-separated lambda/mu values")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _scenario(args, lam=None) -> Scenario:
    fields = [("alpha", args.alpha), ("beta", args.beta), ("lambda", args.lam if lam is None else lam), ("mu", args.mu)]
    for name, value in fields:
        if value is None:
            raise ConfigError(f"--{name} is required")
        if not (np.isfinite(value) and value > 0):
            raise ConfigError(f"--{name} must be a finite positive number, got {value!r}")
    return Scenario(*(v for _, v in fields))


def _quadrature(args) -> QuadratureConfig:
    try:
        return QuadratureConfig(args.abs_tol, args.rel_tol, args.max_subdivisions)
    except DomainError as exc:
        raise ConfigError(str(exc).replace("abs_tol", "--abs-tol").replace("rel_tol", "--rel-tol")
                          .replace("max_subdivisions", "--max-subdivisions")) from None


def _emit(args, data) -> None:
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        if args.out == "-":
            sys.stdout.flush()
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            with open(args.out, "wb") as fh:
                fh.write(data)
    except OSError as exc:
        raise IOError(f"cannot write {args.out}: {exc}") from exc


def _scenario_meta(s: Scenario) -> dict:
    return {"alpha": s.alpha, "beta": s.beta, "lambda": s.lam, "mu": s.mu}


def cmd_cdf(args) -> int:
    s = _scenario(args)
    cfg = _quadrature(args)
    try:
        grid_spec = GridSpec.parse(args.grid_t, "linear") if args.grid_t else GridSpec.parse(args.grid_q or "0.01:0.99:50")
        t = grid_spec.points(s)
    except DomainError as exc:
        raise ConfigError(f"grid: {exc}") from None
    if np.any(np.diff(t) <= 0):
        raise ConfigError("grid: points must be strictly increasing")
    columns, failed = cdf_table(s, t, cfg)
    header = list(CDF_COLUMNS) + (["status"] if failed.any() else [])
    rows = []
    for i in range(t.size):
        row = [columns[c][i] for c in CDF_COLUMNS]
        if failed.any():
            row.append("FAILED" if failed[i] else "ok")
        rows.append(row)
    if args.format == "csv":
        _emit(args, _io.csv_text(header, rows))
    else:
        _emit(args, _io.dumps({
            "meta": {"scenario": _scenario_meta(s), "grid": grid_spec.describe()},
            "rows": [dict(zip(header, row)) for row in rows],
        }))
    if failed.any():
        print(f"cutapprox: quadrature did not converge at {int(failed.sum())} grid point(s)", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_sample(args) -> int:
    s = _scenario(args)
    if args.n < 1:
        raise ConfigError("--n must be a positive integer")
    if args.seed < 0:
        raise ConfigError("--seed must be nonnegative")
    batch = sample_cut(s, args.seed, args.n)
    if args.format == "csv":
        _emit(args, csv_bytes(batch))
    elif args.format == "binary":
        _emit(args, np.asarray(batch.values, dtype="<f8").tobytes())
    else:
        _emit(args, _io.dumps({"meta": {"scenario": _scenario_meta(s), "seed": args.seed, "n": args.n},
                               "z": batch.values}))
    return EXIT_OK


def cmd_compare(args) -> int:
    s = _scenario(args)
    cfg = _quadrature(args)
    if args.n < 1:
        raise ConfigError("--n must be a positive integer")
    if args.seed < 0:
        raise ConfigError("--seed must be nonnegative")
    summary = compare(s, args.seed, args.n, cfg)
    if args.format == "json":
        _emit(args, _io.dumps(summary))
    else:
        keys = sorted(summary)
        _emit(args, _io.csv_text(keys, [[summary[k] for k in keys]]))
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _scenario(args, lam=1.0 if args.mu is None else args.mu)
    cfg = _quadrature(args)
    try:
        ratios = [float(x) for x in args.ratios.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--ratios must be comma-separated numbers, got {args.ratios!r}") from None
    if not ratios:
        raise ConfigError("--ratios must list at least one lambda/mu value")
    if any(not (np.isfinite(r) and r > 0) for r in ratios):
        raise ConfigError("--ratios values must be positive")
    report = sweep(base, ratios, cfg)
    _emit(args, report.to_json() if args.format == "json" else report.to_csv())
    for row in report.rows:
        print(row.verdict(), file=sys.stderr)
    return EXIT_OK if report.succeeded else EXIT_NUMERIC


COMMANDS = {"cdf": cmd_cdf, "sample": cmd_sample, "compare": cmd_compare, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"cutapprox: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"cutapprox: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"cutapprox: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # e.g. a malformed CUTAPPROX_THREADS
        print(f"cutapprox: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
