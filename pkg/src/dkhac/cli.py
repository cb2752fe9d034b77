"""Command-line interface.

Subcommands: ``run`` (Monte Carlo experiment grids), ``estimate``
(long-run variance of a CSV of scores), ``table`` (render saved results),
``simulate`` (dump generated model paths). Exit codes: 0 success,
2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

import numpy as np

from . import bandwidths as bw
from . import harness
from .dgp import DgpSpec, simulate
from .estimators import classical_hac, dk_hac, ewc, ewc_default_terms
from .exceptions import ConfigurationError, NumericError
from .local_cov import SmoothingPlan


def _build_parser():
    parser = argparse.ArgumentParser(prog="lrv",
                                     description="Long-run variance estimation and "
                                                 "HAR Monte Carlo experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo experiment grid")
    run.add_argument("--config", help="TOML experiment config")
    run.add_argument("--out", help="results CSV path (resumes existing cells)")
    run.add_argument("--threads", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--models", nargs="+", default=None)
    run.add_argument("--estimators", nargs="+", default=None)
    run.add_argument("--sample-sizes", nargs="+", type=int, default=None)
    run.add_argument("--deltas", nargs="+", type=float, default=None)
    run.add_argument("--n-reps", type=int, default=None)
    run.add_argument("--alpha", type=float, default=None)
    run.add_argument("--progress", action="store_true")

    est = sub.add_parser("estimate", help="estimate the LRV of a CSV of scores")
    est.add_argument("--input", required=True,
                     help="CSV with a header row, one column per score series")
    est.add_argument("--estimator", default="dk-hac",
                     choices=["dk-hac", "hac-qs", "nw", "ewc"])
    est.add_argument("--bandwidth", default=None,
                     help='"joint-plugin", "andrews", "nw94" or "fixed:<b1>,<b2>"')
    est.add_argument("--block-length", type=int, default=None)

    tab = sub.add_parser("table", help="render saved results")
    tab.add_argument("--in", dest="inp", required=True)
    tab.add_argument("--format", default="markdown", choices=["csv", "json", "markdown"])
    tab.add_argument("--out", default=None)

    sim = sub.add_parser("simulate", help="dump generated model paths to CSV")
    sim.add_argument("--model", required=True)
    sim.add_argument("--sample-size", type=int, required=True)
    sim.add_argument("--delta", type=float, default=0.0)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--dump-paths", required=True, help="output CSV path")

    cache = sub.add_parser("fixed-b-cv", help="(re)generate a fixed-b critical value")
    cache.add_argument("--b", type=float, default=1.0)
    cache.add_argument("--alpha", type=float, default=0.05)
    cache.add_argument("--force", action="store_true", help="ignore the cache")
    return parser


def _read_scores(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise ConfigurationError(f"no data rows in {path}")
    return header, np.asarray(rows)


def _parse_bandwidth(text):
    if text is None or text in ("joint-plugin", "andrews", "nw94"):
        return text
    if text.startswith("fixed:"):
        parts = text[len("fixed:"):].split(",")
        if len(parts) not in (1, 2):
            raise ConfigurationError(f"bad fixed bandwidth spec {text!r}")
        return tuple(float(p) for p in parts)
    raise ConfigurationError(f"unknown bandwidth selector {text!r}")


def _cmd_estimate(args):
    header, V = _read_scores(args.input)
    T = V.shape[0]
    bwsel = _parse_bandwidth(args.bandwidth)
    block = args.block_length or bw.default_block_length(T)
    meta = {}
    if args.estimator == "dk-hac":
        if isinstance(bwsel, tuple):
            b1, b2 = bwsel
        else:
            if bwsel not in (None, "joint-plugin"):
                raise ConfigurationError(f"estimator dk-hac uses the joint-plugin or "
                                         f"fixed bandwidths, not {bwsel!r}")
            pair, _ = bw.joint_plugin_bandwidths(V, block_length=block)
            b1, b2 = pair.b1, pair.b2
        result = dk_hac(V, SmoothingPlan(b1=b1, b2=b2, block_length=block))
        meta = {"b1": b1, "b2": b2, "block_length": block}
    elif args.estimator == "hac-qs":
        if isinstance(bwsel, tuple):
            b1 = bwsel[0]
        else:
            alpha_hat = bw.andrews_alpha(V, q=2)
            b1 = bw.andrews_bandwidth(alpha_hat, 2, "qs", T)
        result = classical_hac(V, b1, "qs")
        meta = {"b1": b1}
    elif args.estimator == "nw":
        b1 = bwsel[0] if isinstance(bwsel, tuple) else bw.newey_west_bandwidth(V)
        result = classical_hac(V, b1, "bartlett")
        meta = {"b1": b1}
    else:  # ewc
        B = ewc_default_terms(T)
        result = ewc(V, B)
        meta = {"df": B}
    out = {"estimator": args.estimator, "series": header, "T": T,
           "lrv": result.J.tolist(), "min_eig": result.min_eig, **meta}
    print(json.dumps(out, indent=1))


def _cmd_run(args):
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    overrides = {
        "models": args.models, "estimators": args.estimators,
        "sample_sizes": args.sample_sizes, "deltas": args.deltas,
        "n_reps": args.n_reps, "alpha": args.alpha,
        "base_seed": args.seed, "threads": args.threads, "out_path": args.out,
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    existing = None
    if cfg.out_path:
        try:
            existing = harness.load_results(cfg.out_path)
        except FileNotFoundError:
            existing = None
    results = harness.run_experiment(cfg, existing=existing, progress=args.progress)
    if cfg.out_path:
        harness.save_results(results, cfg.out_path)
    else:
        print(harness.emit_table(results, "csv"), end="")


def _cmd_table(args):
    results = harness.load_results(args.inp)
    text = harness.emit_table(results, args.format, path=args.out)
    if args.out is None:
        print(text, end="" if text.endswith("\n") else "\n")


def _cmd_simulate(args):
    y, X = simulate(DgpSpec(model=args.model, T=args.sample_size,
                            delta=args.delta, seed=args.seed))
    with open(args.dump_paths, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y"] + [f"x{j}" for j in range(X.shape[1])])
        for t in range(len(y)):
            writer.writerow([y[t], *X[t]])


def _cmd_fixed_b_cv(args):
    from .har import fixed_b_critical_value

    cv = fixed_b_critical_value(args.b, "bartlett", args.alpha, force=args.force)
    print(f"{cv:.6f}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "estimate": _cmd_estimate,
        "table": _cmd_table,
        "simulate": _cmd_simulate,
        "fixed-b-cv": _cmd_fixed_b_cv,
    }[args.command]
    try:
        handler(args)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
