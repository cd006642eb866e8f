"""Command-line interface.

Subcommands: simulate (emit a dataset), estimate (fit loadings and
factors from a dataset file), select-rank, benchmark (run a Monte
Carlo experiment grid) and rolling-validate (real-data protocol).
Every subcommand accepts --config (a JSON file of keyword settings)
with individual flags overriding config values.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .estimators import IterationControl, get_estimator, mpca_f
from .harness import (ExperimentSpec, emit_results, ingest_portfolios,
                      read_dataset, run_monte_carlo, write_dataset)
from .metrics import rolling_validate
from .model import Ranks, factor_scores
from .ranks import select_rank
from .sampling import SimulationConfig, gen_dataset


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _merged(cfg: dict, args: argparse.Namespace, keys) -> dict:
    out = dict(cfg)
    for key in keys:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            out[key] = val
    return out


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_simulate(args) -> int:
    cfg = _merged(_load_config(args.config), args,
                  ["p", "q", "p0", "q0", "T", "phi", "psi", "s_E", "dist",
                   "seed"])
    sim = SimulationConfig(**cfg)
    X, _ = gen_dataset(sim)
    if args.out is None:
        raise SystemExit("simulate requires --out")
    write_dataset(args.out, X)
    print(f"wrote {X.shape[0]} observations of {X.shape[1]}x{X.shape[2]} "
          f"to {args.out}")
    return 0


def cmd_estimate(args) -> int:
    cfg = _merged(_load_config(args.config), args,
                  ["p0", "q0", "method"])
    X = read_dataset(args.data)
    ranks = Ranks(cfg.get("p0", 3), cfg.get("q0", 3))
    method = cfg.get("method", "mpca_f")
    ctl = IterationControl()
    if method == "mpca_f":
        fit = mpca_f(X, ranks, ctl)
        L, iters = fit.loadings, fit.iterations
    else:
        L, iters = get_estimator(method)(X, ranks, ctl), 0
    F = factor_scores(X, L)
    payload = {"method": method, "iterations": iters,
               "R": L.R.tolist(), "C": L.C.tolist(),
               "factors": F.tolist()}
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_select_rank(args) -> int:
    cfg = _merged(_load_config(args.config), args, ["method", "r_max"])
    X = read_dataset(args.data)
    sel = select_rank(X, cfg.get("method", "mer_f"), cfg.get("r_max", 8))
    payload = {"method": sel.method, "p0_hat": sel.p0_hat,
               "q0_hat": sel.q0_hat, "r0_hat": sel.r0_hat,
               "ratio_traces": {k: np.asarray(v).tolist()
                                for k, v in sel.ratio_traces.items()}}
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_benchmark(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["base_seed"] = args.seed
    spec = ExperimentSpec(**cfg)
    table = run_monte_carlo(spec, n_jobs=args.jobs, progress=args.progress)
    if args.out is None:
        sys.stdout.write(table.to_markdown())
    else:
        emit_results(table, args.out, args.format)
        print(f"wrote {len(table.rows)} rows to {args.out}")
    if table.failures:
        print(f"{len(table.failures)} replication(s) failed", file=sys.stderr)
    return 0


def cmd_rolling_validate(args) -> int:
    cfg = _merged(_load_config(args.config), args,
                  ["p0", "q0", "method", "bandwidth"])
    X, months, years = ingest_portfolios(
        args.data, sentinel=cfg.get("sentinel", -99.99))
    ranks = Ranks(cfg.get("p0", 1), cfg.get("q0", 2))
    test_years = cfg.get("test_years")
    rows, summary = rolling_validate(
        X, years, cfg.get("bandwidth", 5), ranks,
        method=cfg.get("method", "mpca_f"), test_years=test_years)
    payload = {"per_year": [{"year": int(y), "mse": m, "op_max": o}
                            for y, m, o in rows],
               "summary": summary}
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpca",
        description="Robust two-way factor analysis of matrix time series")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--format", default="csv",
                        choices=["csv", "json", "markdown"])

    sp = sub.add_parser("simulate", help="generate a synthetic dataset")
    common(sp)
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--p0", type=int)
    sp.add_argument("--q0", type=int)
    sp.add_argument("--T", type=int)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--psi", type=float)
    sp.add_argument("--s-E", dest="s_E", type=float)
    sp.add_argument("--dist")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("estimate", help="fit loadings from a dataset file")
    common(sp)
    sp.add_argument("--data", required=True)
    sp.add_argument("--method")
    sp.add_argument("--p0", type=int)
    sp.add_argument("--q0", type=int)
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("select-rank", help="estimate the factor numbers")
    common(sp)
    sp.add_argument("--data", required=True)
    sp.add_argument("--method")
    sp.add_argument("--r-max", dest="r_max", type=int)
    sp.set_defaults(func=cmd_select_rank)

    sp = sub.add_parser("benchmark", help="run a Monte Carlo experiment grid")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--progress", action="store_true")
    sp.set_defaults(func=cmd_benchmark)

    sp = sub.add_parser("rolling-validate",
                        help="rolling validation on a monthly panel")
    common(sp)
    sp.add_argument("--data", required=True)
    sp.add_argument("--method")
    sp.add_argument("--p0", type=int)
    sp.add_argument("--q0", type=int)
    sp.add_argument("--bandwidth", type=int)
    sp.set_defaults(func=cmd_rolling_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
