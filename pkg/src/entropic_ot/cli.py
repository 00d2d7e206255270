"""Command line interface: ``entropic-ot <subcommand> ...``.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from ._parallel import ReplicateError
from .costs import get_cost
from .divergence import sinkhorn_divergence
from .experiments import ExperimentConfig, run_null_experiment, write_outputs
from .independence import SampleTooLargeError, independence_statistic, independence_test
from .inference import map_confidence_band, mn_bootstrap_null
from .io import InputError, dump_json, read_grid, read_points, write_csv
from .measures import PairedSample, from_samples
from .potentials import barycentric_map, default_grid, grad_potential_1
from .sinkhorn import NumericalError, SinkhornConfig, SinkhornConvergenceError, solve_schrodinger

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _solver_args(p):
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--cost", default="quadratic")


def _config(args):
    return SinkhornConfig(epsilon=args.epsilon, tol=args.tol, max_iter=args.max_iter)


def _grid(args, *measures):
    if getattr(args, "grid", None):
        return read_grid(args.grid)
    return default_grid(*measures)


def cmd_divergence(args):
    x1, x2 = read_points(args.sample1), read_points(args.sample2)
    b = sinkhorn_divergence(from_samples(x1), from_samples(x2), get_cost(args.cost), _config(args))
    out = {
        "s12": b.s12, "s11": b.s11, "s22": b.s22, "sbar": b.sbar,
        "dual_sbar": b.dual_sbar(), "sigma2": b.variance(),
    }
    print(dump_json(out, args.output))
    return EXIT_OK


def cmd_map(args):
    x1, x2 = read_points(args.sample1), read_points(args.sample2)
    mu1, mu2 = from_samples(x1), from_samples(x2)
    cost = get_cost(args.cost)
    sol = solve_schrodinger(mu1, mu2, cost, _config(args))
    grid = _grid(args, mu1, mu2)
    bary = barycentric_map(sol, grid)
    grad_form = grid - grad_potential_1(sol, grid)
    d = grid.shape[1]
    if args.csv:
        write_csv(
            args.csv,
            [f"x{k + 1}" for k in range(d)] + [f"T{k + 1}" for k in range(d)],
            np.hstack([grid, bary]).tolist(),
        )
    out = {
        "grid": grid.tolist(),
        "barycentric": bary.tolist(),
        "gradient_form": grad_form.tolist(),
        "max_form_gap": float(np.abs(bary - grad_form).max()),
        "iterations": sol.iterations,
        "final_violation": sol.final_violation,
    }
    print(dump_json(out, args.output))
    return EXIT_OK


def cmd_band(args):
    mu1 = from_samples(read_points(args.mu1))
    x2 = read_points(args.sample2)
    grid = _grid(args, mu1, from_samples(x2))
    band = map_confidence_band(
        mu1, x2, args.coordinate, grid, args.alpha, args.B,
        get_cost(args.cost), _config(args), seed=args.seed,
    )
    if args.csv:
        d = grid.shape[1]
        write_csv(
            args.csv,
            [f"x{k + 1}" for k in range(d)] + ["center", "lower", "upper"],
            [list(g) + [c, lo, hi] for g, c, lo, hi in zip(grid, band.center, band.lower, band.upper)],
        )
    print(dump_json(band.to_dict(), args.output))
    return EXIT_OK


def cmd_null_test(args):
    x1, x2 = read_points(args.sample1), read_points(args.sample2)
    n = x1.shape[0]
    m = args.m if args.m else max(2, int(round(args.m_fraction * n)))
    report = mn_bootstrap_null(x1, x2, m, args.B, get_cost(args.cost), _config(args), seed=args.seed)
    if args.csv:
        report.to_csv(args.csv)
    print(dump_json(report.to_dict(), args.output))
    return EXIT_OK


def cmd_independence(args):
    x = read_points(args.sample)
    if not 1 <= args.split < x.shape[1]:
        raise InputError(f"--split must be between 1 and {x.shape[1] - 1}")
    s = PairedSample(x[:, : args.split], x[:, args.split :])
    if s.n < 4:
        # too few rows to calibrate; report the statistic alone
        d_n = independence_statistic(s, get_cost(args.cost), _config(args), max_n=args.max_n)
        out = {"d_n": d_n, "n": s.n, "scaled": s.n * d_n, "p_value": None, "B": 0,
               "seed": args.seed, "calibration": []}
        print(dump_json(out, args.output))
        return EXIT_OK
    res = independence_test(
        s, args.B, get_cost(args.cost), _config(args), seed=args.seed, max_n=args.max_n,
    )
    if args.csv:
        res.calibration.to_csv(args.csv)
    print(dump_json(res.to_dict(), args.output))
    return EXIT_OK


_OVERRIDES = ("n", "outer_reps", "bootstrap_reps", "epsilon", "tol", "seed", "output_dir")


def cmd_experiment(args):
    base = {}
    if args.config:
        try:
            base = json.loads(open(args.config).read())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config: {exc}") from exc
    for key in _OVERRIDES:
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if args.m_fractions:
        base["m_fractions"] = args.m_fractions
    cfg = ExperimentConfig.from_dict(base)
    result = run_null_experiment(cfg)
    summary = write_outputs(result, cfg.output_dir)
    print(dump_json(summary))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropic-ot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", help="Sinkhorn divergence between two samples")
    p.add_argument("sample1")
    p.add_argument("sample2")
    p.add_argument("--output", help="also write the JSON here")
    _solver_args(p)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("map", help="entropic map evaluated on a grid")
    p.add_argument("sample1")
    p.add_argument("sample2")
    p.add_argument("--grid", help="JSON file or text: list of points or {lower, upper, resolution}")
    p.add_argument("--csv", help="write grid and map values as CSV")
    p.add_argument("--output")
    _solver_args(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("band", help="bootstrap confidence band for one map coordinate")
    p.add_argument("mu1", help="support points of the known source measure (uniform weights)")
    p.add_argument("sample2")
    p.add_argument("--coordinate", type=int, default=1, help="1-based coordinate")
    p.add_argument("--grid")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write the band table as CSV")
    p.add_argument("--output")
    _solver_args(p)
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("null-test", help="m-out-of-n bootstrap of n * Sbar")
    p.add_argument("sample1")
    p.add_argument("sample2")
    p.add_argument("--m", type=int)
    p.add_argument("--m-fraction", type=float, default=0.1)
    p.add_argument("--B", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="write replicates as CSV")
    p.add_argument("--output")
    _solver_args(p)
    p.set_defaults(func=cmd_null_test)

    p = sub.add_parser("independence", help="Sinkhorn independence permutation test")
    p.add_argument("sample", help="CSV with v coordinates followed by w coordinates")
    p.add_argument("--split", type=int, default=1, help="number of leading v coordinates")
    p.add_argument("--B", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=300)
    p.add_argument("--csv", help="write permutation replicates as CSV")
    p.add_argument("--output")
    _solver_args(p)
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("experiment", help="null-distribution experiment writing CSV tables")
    p.add_argument("--config", help="JSON experiment manifest; flags override it")
    p.add_argument("--n", type=int)
    p.add_argument("--m-fractions", type=float, nargs="+")
    p.add_argument("--outer-reps", type=int)
    p.add_argument("--bootstrap-reps", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SampleTooLargeError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SinkhornConvergenceError, NumericalError, ReplicateError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
