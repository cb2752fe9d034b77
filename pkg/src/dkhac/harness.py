"""Experiment orchestration: replicated size/power cells and table output.

A cell is one (model, estimator, T, delta) combination. Each replication
simulates the model, fits it, estimates the long-run variance with the
configured method, forms the test statistic and compares it with the
configured critical value. Seeds are derived per cell and per replication
from the base seed, so results are bit-identical for any thread count and
cells can be recomputed independently (resume).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import bandwidths as bw
from . import har
from .dgp import MODELS, DgpSpec, simulate
from .estimators import classical_hac, dk_hac, ewc, ewc_default_terms
from .exceptions import ConfigurationError, NumericError
from .local_cov import SmoothingPlan

__all__ = [
    "ESTIMATORS",
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
    "run_cell",
    "replicate",
    "emit_table",
    "save_results",
    "load_results",
    "load_config",
]

# estimator presets: LRV method + bandwidth rule + critical-value method
ESTIMATORS = ("dk-hac", "hac-qs", "nw", "kvb", "ewc")


@dataclass
class ExperimentConfig:
    models: list = field(default_factory=lambda: ["m1"])
    estimators: list = field(default_factory=lambda: ["dk-hac"])
    sample_sizes: list = field(default_factory=lambda: [200])
    deltas: list = field(default_factory=lambda: [0.0])
    n_reps: int = 5000
    alpha: float = 0.05
    base_seed: int = 0
    threads: int = 1
    out_path: str | None = None

    def validate(self):
        if self.n_reps < 100:
            raise ConfigurationError(f"n_reps must be >= 100, got {self.n_reps}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")
        for m in self.models:
            if m.lower() not in MODELS:
                raise ConfigurationError(f"unknown model {m!r}")
        for e in self.estimators:
            if e not in ESTIMATORS:
                raise ConfigurationError(f"unknown estimator {e!r}; choose from {ESTIMATORS}")
        return self


@dataclass(frozen=True)
class ExperimentResult:
    model: str
    estimator: str
    T: int
    delta: float
    rejection_rate: float
    mcse: float
    n_reps: int
    degenerate_count: int
    wall_time: float

    def key(self):
        return (self.model, self.estimator, self.T, self.delta)


def cell_seed(base_seed: int, model: str, estimator: str, T: int, delta: float) -> int:
    """Stable 64-bit cell seed from the cell coordinates."""
    text = f"{base_seed}|{model}|{estimator}|{T}|{delta:.10g}"
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


def _rep_rng(cseed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=cseed, spawn_key=(rep,)))


def _lrv_fn(name: str):
    """Preset ``name`` as a scores -> LrvEstimate function plus the
    critical-value spec ("normal",), ("student", df-rule) or ("fixedb", b)."""
    if name == "dk-hac":
        def fn(scores):
            pair, _ = bw.joint_plugin_bandwidths(scores)
            plan = SmoothingPlan(b1=pair.b1, b2=pair.b2,
                                 block_length=bw.default_block_length(scores.shape[0]))
            return dk_hac(scores, plan)
        return fn, ("normal",)
    if name == "hac-qs":
        def fn(scores):
            alpha_hat = bw.andrews_alpha(scores, q=2)
            b1 = bw.andrews_bandwidth(alpha_hat, 2, "qs", scores.shape[0])
            return classical_hac(scores, b1, "qs")
        return fn, ("normal",)
    if name == "nw":
        def fn(scores):
            return classical_hac(scores, bw.newey_west_bandwidth(scores), "bartlett")
        return fn, ("normal",)
    if name == "kvb":
        def fn(scores):
            return classical_hac(scores, 1.0 / scores.shape[0], "bartlett")
        return fn, ("fixedb", 1.0)
    if name == "ewc":
        def fn(scores):
            return ewc(scores, ewc_default_terms(scores.shape[0]))
        return fn, ("student", None)
    raise ConfigurationError(f"unknown estimator {name!r}")


def _cv_from_spec(cv_spec, alpha: float, lrv) -> float:
    kind = cv_spec[0]
    if kind == "normal":
        return har.critical_value("normal", alpha)
    if kind == "student":
        return har.critical_value("student", alpha, df=lrv.df)
    if kind == "fixedb":
        return har.critical_value("fixedb", alpha, b=cv_spec[1], kernel="bartlett")
    raise ConfigurationError(f"unknown critical value spec {cv_spec!r}")


def replicate(model: str, estimator: str, T: int, delta: float, alpha: float, seed):
    """One Monte Carlo replication; returns (rejected, degenerate_flag)."""
    info = MODELS[model.lower()]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        y, X = simulate(DgpSpec(model=model, T=T, delta=delta, seed=seed))
        lrv_fn, cv_spec = _lrv_fn(estimator)
        if info["statistic"] == "t":
            fit = har.ols_fit(y, X)
            lrv = lrv_fn(fit.scores)
            stat, repaired = har.t_statistic(fit, lrv, info["coord"],
                                             info["beta0"][info["coord"]])
        else:
            g = har.gr_inputs(y, X, in_size=int(round(0.4 * T)))
            lrv = har.gr_variance(g, lrv_fn)
            stat = har.gr_statistic(g, lrv)
            repaired = lrv.psd_repaired
    cv = _cv_from_spec(cv_spec, alpha, lrv)
    return bool(abs(stat) > cv), bool(repaired)


def run_cell(model: str, estimator: str, T: int, delta: float, n_reps: int,
             alpha: float, base_seed: int, threads: int = 1) -> ExperimentResult:
    """Replicate one cell. Per-replication failures are tolerated up to 1%
    of the replications, else the cell errors."""
    cseed = cell_seed(base_seed, model, estimator, T, delta)
    start = time.perf_counter()

    def one(rep: int):
        rng = _rep_rng(cseed, rep)
        try:
            return replicate(model, estimator, T, delta, alpha, rng)
        except (NumericError, np.linalg.LinAlgError) as exc:
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(one, range(n_reps)))
    else:
        outcomes = [one(rep) for rep in range(n_reps)]

    failures = sum(isinstance(o, Exception) for o in outcomes)
    if failures > 0.01 * n_reps:
        raise NumericError(f"cell {model}/{estimator}/T={T}/delta={delta}: "
                           f"{failures} of {n_reps} replications failed")
    used = [o for o in outcomes if not isinstance(o, Exception)]
    rejections = sum(r for r, _ in used)
    degenerate = sum(d for _, d in used) + failures
    rate = rejections / len(used)
    return ExperimentResult(
        model=model, estimator=estimator, T=T, delta=delta,
        rejection_rate=rate, mcse=math.sqrt(rate * (1.0 - rate) / len(used)),
        n_reps=len(used), degenerate_count=degenerate,
        wall_time=time.perf_counter() - start,
    )


def run_experiment(cfg: ExperimentConfig, existing=None, progress=False):
    """Run every cell of the config grid.

    ``existing`` may hold previously computed results; their cells are
    returned as-is and only missing cells are computed (resume).
    """
    cfg.validate()
    done = {r.key(): r for r in existing} if existing else {}
    results = []
    for model in cfg.models:
        for estimator in cfg.estimators:
            for T in cfg.sample_sizes:
                for delta in cfg.deltas:
                    key = (model, estimator, int(T), float(delta))
                    if key in done:
                        results.append(done[key])
                        continue
                    res = run_cell(model, estimator, int(T), float(delta),
                                   cfg.n_reps, cfg.alpha, cfg.base_seed, cfg.threads)
                    results.append(res)
                    if progress:
                        print(f"{model} {estimator} T={T} delta={delta}: "
                              f"rate={res.rejection_rate:.4f} (mcse={res.mcse:.4f}, "
                              f"{res.wall_time:.1f}s)", file=sys.stderr)
    return results


# ---------------------------------------------------------------------------
# result persistence and tables

_COLUMNS = [f.name for f in fields(ExperimentResult)]


def save_results(results, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_COLUMNS)
        for r in results:
            writer.writerow([getattr(r, c) for c in _COLUMNS])


def load_results(path):
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(ExperimentResult(
                model=row["model"], estimator=row["estimator"], T=int(row["T"]),
                delta=float(row["delta"]), rejection_rate=float(row["rejection_rate"]),
                mcse=float(row["mcse"]), n_reps=int(row["n_reps"]),
                degenerate_count=int(row["degenerate_count"]),
                wall_time=float(row["wall_time"])))
    return out


def emit_table(results, fmt: str = "markdown", path=None) -> str:
    """Render results as csv, json or a markdown table (estimators as rows,
    sample size / alternative magnitude combinations as columns)."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(_COLUMNS)
        for r in results:
            writer.writerow([getattr(r, c) for c in _COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([{c: getattr(r, c) for c in _COLUMNS} for r in results], indent=1)
    elif fmt == "markdown":
        lines = []
        for model in sorted({r.model for r in results}):
            rows = [r for r in results if r.model == model]
            cols = sorted({(r.T, r.delta) for r in rows})
            heads = [f"T={T}, delta={d:g}" for T, d in cols]
            lines.append(f"### Model {model.upper()}")
            lines.append("| estimator | " + " | ".join(heads) + " |")
            lines.append("|---" * (len(cols) + 1) + "|")
            for est in sorted({r.estimator for r in rows}):
                cells = []
                for col in cols:
                    match = [r for r in rows if r.estimator == est and (r.T, r.delta) == col]
                    cells.append(f"{match[0].rejection_rate:.3f}" if match else "")
                lines.append(f"| {est} | " + " | ".join(cells) + " |")
            lines.append("")
        text = "\n".join(lines)
    else:
        raise ConfigurationError(f"unknown table format {fmt!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def load_config(path) -> ExperimentConfig:
    """Read an experiment config from a TOML file."""
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"bad config file {path}: {exc}") from exc
    allowed = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**raw)
