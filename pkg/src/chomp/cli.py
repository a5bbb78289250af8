"""Command-line entry points.

Three subcommands cover the full workflow: `simulate` runs a scenario file
and writes the aggregated result table, `fit` estimates a subspace from a
data CSV, and `eval` scores a fitted basis against a known truth. Every
path writes delimited output plus a rendered figure next to it (suppress
with --no-plots).

Exit codes: 0 success, 2 scenario validation, 3 unreadable or ill-typed
data, 4 mismatched dimensions in evaluation, 130 interrupted (partial
results are flushed first).
"""

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import load_scenario
from .exceptions import (ConfigError, DimensionMismatch, InputDataError,
                         ReplicationInterrupt, SdrError, ZeroVarianceColumn)
from .kernels import METHODS, prepare
from .metrics import distance_correlation, evaluate
from .simgen import run_replications
from .solvers import ESTIMATORS, fit_subspace
from .tables import ResultTable, _format_float
from .tuning import TuningPolicy


def resolve_threads(value):
    """--threads flag, then SDR_THREADS, then the machine's core count."""
    if value is None:
        value = os.environ.get("SDR_THREADS")
    if value is None:
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"thread count must be an integer, got {value!r}")
    if threads < 1:
        raise ConfigError(f"thread count must be positive, got {threads}")
    return threads


def parse_tuning(text, seed):
    """Tuning flag syntax: pic, cv, fixed=MU, or theory=SCALE."""
    if text is None:
        return None
    kind, _, arg = text.partition("=")
    try:
        if kind == "fixed":
            return TuningPolicy(kind="fixed", mu=float(arg or 0.0), seed=seed)
        if kind == "theory":
            return TuningPolicy(kind="theory", scale=float(arg or 1.0), seed=seed)
        if arg:
            raise ConfigError(f"tuning kind {kind!r} takes no value")
        return TuningPolicy(kind=kind, seed=seed)
    except ValueError as exc:
        raise ConfigError(f"bad tuning flag {text!r}: {exc}") from exc


def read_data_csv(path, response_col):
    """Header-labelled numeric CSV -> (X, y, predictor names)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputDataError(f"{path} is empty")
            rows = list(reader)
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from exc
    header = [h.strip() for h in header]
    if response_col not in header:
        raise InputDataError(f"response column {response_col!r} not in {header}")
    if not rows:
        raise InputDataError(f"{path} has no data rows")
    yi = header.index(response_col)
    data = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise InputDataError(f"{path} row {i + 2}: {len(row)} fields, "
                                 f"expected {len(header)}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise InputDataError(
                    f"{path} row {i + 2}, column {header[j]!r}: "
                    f"not a number: {cell!r}") from None
    mask = np.arange(len(header)) != yi
    names = [h for k, h in enumerate(header) if k != yi]
    return data[:, mask], data[:, yi], names


def read_coefficients(path):
    """Coefficient table written by `fit` (or shaped like it) -> p x d array."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputDataError(f"{path} is empty")
            rows = list(reader)
    except OSError as exc:
        raise InputDataError(f"cannot read {path}: {exc}") from exc
    skip = 1 if header and header[0] == "variable" else 0
    if not rows:
        raise InputDataError(f"{path} has no data rows")
    try:
        values = [[float(c) for c in row[skip:]] for row in rows]
    except ValueError as exc:
        raise InputDataError(f"{path}: non-numeric coefficient: {exc}") from exc
    B = np.asarray(values, dtype=float)
    if B.ndim != 2 or B.shape[1] == 0:
        raise InputDataError(f"{path}: no coefficient columns found")
    return B


def write_coefficients(path, names, B):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["variable"] + [f"dim_{j + 1}" for j in range(B.shape[1])])
        for name, row in zip(names, B):
            writer.writerow([name] + [_format_float(v) for v in row])


def cmd_simulate(args):
    cfg = load_scenario(args.config)
    scenario = cfg.scenario
    if args.seed is not None:
        from dataclasses import replace
        scenario = replace(scenario, base_seed=args.seed)
    outdir = Path(args.output or cfg.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    threads = resolve_threads(args.threads)

    interrupted = False
    try:
        result = run_replications(scenario, threads=threads)
    except ReplicationInterrupt as exc:
        result = exc.partial
        interrupted = True
    table = ResultTable.from_result(result)
    csv_path = outdir / "results.csv"
    table.write_csv(csv_path)
    if not args.no_plots:
        from .plots import plot_results
        plot_results(table, outdir / "results.png")
    done = len({r.rep for r in result.records})
    status = "interrupted after" if interrupted else "completed"
    print(f"{status} {done}/{scenario.reps} replications -> {csv_path}")
    return 130 if interrupted else 0


def cmd_fit(args):
    X, y, names = read_data_csv(args.data, args.response_col)
    dead = np.flatnonzero(X.std(axis=0) == 0.0)
    if dead.size:
        raise ZeroVarianceColumn(names[int(dead[0])])
    dataset = prepare(X, y, standardize=args.standardize)
    policy = parse_tuning(args.tuning, args.seed)
    if policy is None and args.estimator == "lasso-sir":
        policy = TuningPolicy(kind="cv", seed=args.seed)
    est = fit_subspace(dataset, args.method, args.estimator, d=args.d, H=args.H,
                       gamma=args.gamma, tuning=policy)

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    write_coefficients(outdir / "coefficients.csv", names, est.B)

    U = dataset.X @ est.B
    selected = np.flatnonzero(np.any(est.B != 0.0, axis=1))
    report = {
        "estimator": args.estimator,
        "method": args.method,
        "d": args.d,
        "H": args.H,
        "n": dataset.n,
        "p": dataset.p,
        "selected_mu": [f.mu for f in est.fits],
        "support_sizes": [int(f.support.size) for f in est.fits],
        "converged": [bool(f.converged) for f in est.fits],
        "n_selected": int(selected.size),
        "selected_variables": [names[k] for k in selected],
        "distance_correlation": distance_correlation(U, dataset.y),
    }
    with open(outdir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not args.no_plots:
        from .plots import plot_predictors
        plot_predictors(U, dataset.y, outdir / "predictors.png")
    print(f"fitted {args.estimator}: {selected.size} of {dataset.p} variables, "
          f"dCor {report['distance_correlation']:.3f} -> {outdir / 'report.json'}")
    return 0


def cmd_eval(args):
    B_hat = read_coefficients(args.fit)
    B_true = read_coefficients(args.truth)
    report = evaluate(B_hat, B_true)

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "eval.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["error", "fpr", "fnr"])
        writer.writerow([_format_float(report.error), _format_float(report.fpr),
                         _format_float(report.fnr)])
    if not args.no_plots:
        from .plots import plot_eval
        plot_eval(report, outdir / "eval.png")
    print(f"error {report.error:.4f} fpr {report.fpr:.4f} fnr {report.fnr:.4f} "
          f"-> {path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chomp",
        description="Sparse sufficient dimension reduction via Cholesky "
                    "matrix penalization.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario file")
    sim.add_argument("config", help="scenario JSON path")
    sim.add_argument("--output", default=None, help="output directory")
    sim.add_argument("--seed", type=int, default=None,
                     help="override the scenario base seed")
    sim.add_argument("--threads", default=None,
                     help="worker processes (default: SDR_THREADS or all cores)")
    sim.add_argument("--no-plots", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="fit a subspace to a data CSV")
    fit.add_argument("data", help="CSV with a header row")
    fit.add_argument("--response-col", required=True,
                     help="name of the response column")
    fit.add_argument("--d", type=int, default=1, help="number of dimensions")
    fit.add_argument("--H", type=int, default=20, help="number of slices")
    fit.add_argument("--estimator", default="adaptive-chomp", choices=ESTIMATORS)
    fit.add_argument("--method", default="sir", choices=METHODS)
    fit.add_argument("--gamma", type=float, default=2.0,
                     help="adaptive weight exponent")
    fit.add_argument("--tuning", default=None,
                     help="pic, cv, fixed=MU, or theory=SCALE")
    fit.add_argument("--standardize", action="store_true")
    fit.add_argument("--seed", type=int, default=0,
                     help="seed for cross-validation folds")
    fit.add_argument("--output", default=".", help="output directory")
    fit.add_argument("--no-plots", action="store_true")
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="score a fitted basis against the truth")
    ev.add_argument("fit", help="coefficients.csv from the fit command")
    ev.add_argument("truth", help="true coefficients in the same layout")
    ev.add_argument("--output", default=".", help="output directory")
    ev.add_argument("--no-plots", action="store_true")
    ev.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InputDataError, ZeroVarianceColumn) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SdrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
