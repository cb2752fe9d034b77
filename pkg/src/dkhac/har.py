"""HAR test statistics and critical values.

Regression t-statistics use the sandwich Q^-1 J Q^-1 with J a score
long-run variance estimate: t = sqrt(T) (beta_r - beta0_r) / sqrt(S_rr).
The forecast-breakdown statistic compares out-of-sample losses of a fixed
forecasting scheme with the in-sample average loss:
t = sqrt(T_n) mean(SL) / sqrt(J_SL).

Fixed-b critical values are simulated from the Bartlett limiting
functional of a Brownian bridge and cached in a small JSON file.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from ._validation import check_scores
from .estimators import LrvEstimate, psd_project
from .exceptions import ConfigurationError, NumericError
from .local_cov import classical_autocov

__all__ = [
    "RegressionFit",
    "GrInputs",
    "ols_fit",
    "sandwich_covariance",
    "t_statistic",
    "gr_inputs",
    "gr_scores",
    "gr_statistic",
    "critical_value",
    "fixed_b_critical_value",
]

_COND_LIMIT = 1e10


@dataclass(frozen=True)
class RegressionFit:
    """OLS output packaged for HAR inference.

    ``scores`` holds rows e_t * x_t'; ``qhat`` is X'X/T.
    """

    beta: np.ndarray
    scores: np.ndarray
    qhat: np.ndarray
    residuals: np.ndarray

    @property
    def nobs(self) -> int:
        return self.scores.shape[0]


def ols_fit(y, X) -> RegressionFit:
    """Least squares with the score matrix needed by sandwich variances."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ConfigurationError("y must be (T,) and X (T, p)")
    if np.linalg.cond(X) > _COND_LIMIT:
        raise ConfigurationError("design matrix is rank deficient (condition number > 1e10)")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return RegressionFit(beta=beta, scores=resid[:, None] * X,
                         qhat=X.T @ X / X.shape[0], residuals=resid)


def sandwich_covariance(fit: RegressionFit, J: np.ndarray) -> np.ndarray:
    """Asymptotic covariance of sqrt(T) (beta - beta0): Q^-1 J Q^-1."""
    qinv = np.linalg.inv(fit.qhat)
    return qinv @ J @ qinv


def _repair_floor(scores) -> float:
    return 1e-12 * float(np.trace(classical_autocov(scores, 0)))


def t_statistic(fit: RegressionFit, lrv: LrvEstimate, coord: int, null_value: float):
    """t-statistic for coefficient ``coord`` against ``null_value``.

    If the sandwich diagonal entry is nonpositive (the double-kernel
    estimate need not be PSD) the score LRV is eigenvalue-clipped at
    1e-12 * trace(Gamma_cla(0)) and the variance recomputed; a
    nonpositive variance after repair raises.

    Returns (t, repaired_flag).
    """
    S = sandwich_covariance(fit, lrv.J)
    s2 = S[coord, coord]
    repaired = False
    if s2 <= 0.0:
        lrv = psd_project(lrv, floor=_repair_floor(fit.scores))
        S = sandwich_covariance(fit, lrv.J)
        s2 = S[coord, coord]
        repaired = True
    if s2 <= 0.0:
        raise NumericError("nonpositive variance after PSD repair")
    t = math.sqrt(fit.nobs) * (fit.beta[coord] - null_value) / math.sqrt(s2)
    return t, repaired


@dataclass(frozen=True)
class GrInputs:
    """Losses of a fixed forecasting scheme.

    in_size/out_size are T_m and T_n; only horizon 1 is supported.
    ``surprise_losses`` holds the T_n out-of-sample losses minus the
    average in-sample loss; ``in_losses`` the T_m in-sample losses, needed
    by the variance of the mean surprise loss.
    """

    in_size: int
    out_size: int
    horizon: int
    surprise_losses: np.ndarray
    in_losses: np.ndarray


def gr_inputs(y, X, in_size: int, horizon: int = 1) -> GrInputs:
    """Fit on the first ``in_size`` observations, forecast the rest, and
    return quadratic surprise losses SL_t = L_t - mean in-sample loss."""
    if horizon != 1:
        raise ConfigurationError("only one-step-ahead forecasts are supported")
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    T = y.shape[0]
    in_size = int(in_size)
    if not 2 <= in_size < T:
        raise ConfigurationError(f"in_size must lie in [2, T), got {in_size}")
    fit = ols_fit(y[:in_size], X[:in_size])
    in_losses = fit.residuals**2
    out_err = y[in_size:] - X[in_size:] @ fit.beta
    sl = out_err**2 - in_losses.mean()
    return GrInputs(in_size=in_size, out_size=T - in_size, horizon=1,
                    surprise_losses=sl, in_losses=in_losses)


def gr_scores(g: GrInputs, center: bool = True) -> np.ndarray:
    """Surprise losses as a T_n x 1 score matrix for LRV estimation,
    centered at their sample mean by default."""
    sl = g.surprise_losses
    if center:
        sl = sl - sl.mean()
    return sl[:, None]


def gr_variance(g: GrInputs, lrv_fn, center: bool = True) -> LrvEstimate:
    """Variance of sqrt(T_n) * mean(SL) under the fixed scheme.

    The mean surprise loss subtracts the random in-sample average, so its
    variance has two pieces: the out-of-sample loss LRV plus (T_n/T_m)
    times the in-sample loss LRV. ``lrv_fn`` maps a score matrix to an
    :class:`LrvEstimate` and is applied to both (centered) loss series.
    """
    out_est = lrv_fn(gr_scores(g, center=center))
    in_losses = g.in_losses
    if center:
        in_losses = in_losses - in_losses.mean()
    in_est = lrv_fn(in_losses[:, None])
    J = out_est.J[0, 0] + (g.out_size / g.in_size) * in_est.J[0, 0]
    return LrvEstimate(J=np.array([[J]]), kind=f"gr({out_est.kind})", df=out_est.df,
                       psd_repaired=out_est.psd_repaired or in_est.psd_repaired,
                       min_eig=float(J))


def gr_statistic(g: GrInputs, lrv: LrvEstimate) -> float:
    """sqrt(T_n) * mean(SL) / sqrt(J_SL); requires J_SL > 0."""
    J = float(lrv.J[0, 0])
    if J <= 0.0:
        raise NumericError("nonpositive long-run variance for the surprise-loss series")
    return math.sqrt(g.out_size) * float(g.surprise_losses.mean()) / math.sqrt(J)


# ---------------------------------------------------------------------------
# critical values

_CACHE_LOCK = threading.Lock()
_CV_MEMO: dict[str, float] = {}


def _cache_path() -> Path:
    root = os.environ.get("DKHAC_CACHE_DIR")
    base = Path(root) if root else Path.home() / ".cache" / "dkhac"
    return base / "fixed_b_cv.json"


def _simulate_fixed_b(b: float, alpha: float, n_paths: int, grid_n: int, seed: int,
                      batch: int = 2000) -> float:
    """Empirical (1-alpha) quantile of |W(1) / sqrt(D_b)| where D_b is the
    Bartlett fixed-b functional (2/b)[int B^2 - int B(r) B(r+b) dr] of the
    Brownian bridge B, discretized on grid_n points."""
    rng = np.random.default_rng(seed)
    lag = int(math.floor(b * grid_n))
    tvals = np.empty(n_paths)
    done = 0
    frac = np.arange(1, grid_n + 1) / grid_n
    while done < n_paths:
        m = min(batch, n_paths - done)
        incr = rng.standard_normal((m, grid_n)) / math.sqrt(grid_n)
        W = np.cumsum(incr, axis=1)
        W1 = W[:, -1]
        B = W - np.outer(W1, frac)
        quad = (B**2).mean(axis=1)
        if lag < grid_n:
            cross = np.einsum("ij,ij->i", B[:, : grid_n - lag], B[:, lag:]) / grid_n
        else:
            cross = np.zeros(m)
        D = (2.0 / b) * (quad - cross)
        tvals[done : done + m] = W1 / np.sqrt(D)
        done += m
    return float(np.quantile(np.abs(tvals), 1.0 - alpha))


def fixed_b_critical_value(b: float, kernel: str = "bartlett", alpha: float = 0.05,
                           n_paths: int = 50_000, grid_n: int = 1000, seed: int = 0,
                           force: bool = False) -> float:
    """Simulated two-sided fixed-b critical value, memoized in a JSON cache.

    Only the Bartlett functional is implemented; b = 1 reproduces the
    full-bandwidth value ~4.77 at alpha = 0.05 and b -> 0 approaches the
    normal quantile.
    """
    if kernel != "bartlett":
        raise ConfigurationError("fixed-b critical values are implemented for the "
                                 "bartlett kernel only")
    if not 0.0 < b <= 1.0:
        raise ConfigurationError(f"b must lie in (0, 1], got {b}")
    if n_paths < 10_000:
        raise ConfigurationError("need at least 10000 simulation paths")
    key = f"{kernel}|b={b:.8g}|alpha={alpha:.8g}|paths={n_paths}|grid={grid_n}|seed={seed}"
    with _CACHE_LOCK:  # single-writer initialization; concurrent readers block briefly
        if not force and key in _CV_MEMO:
            return _CV_MEMO[key]
        path = _cache_path()
        disk: dict = {}
        if path.exists():
            try:
                disk = json.loads(path.read_text())
            except (OSError, json.JSONDecodeError):
                disk = {}
        if not force and key in disk:
            _CV_MEMO[key] = float(disk[key])
            return _CV_MEMO[key]
        cv = _simulate_fixed_b(b, alpha, n_paths, grid_n, seed)
        _CV_MEMO[key] = cv
        disk[key] = cv
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(disk, indent=1, sort_keys=True))
        except OSError:
            pass  # cache is best-effort
    return cv


def critical_value(dist: str, alpha: float, df: int | None = None, b: float | None = None,
                   kernel: str = "bartlett", **oracle_kwargs) -> float:
    """Two-sided critical value under ``dist`` in {normal, student, fixedb}."""
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    if dist == "normal":
        return float(stats.norm.ppf(1.0 - alpha / 2.0))
    if dist == "student":
        if df is None or df < 1:
            raise ConfigurationError("student critical value needs df >= 1")
        return float(stats.t.ppf(1.0 - alpha / 2.0, df))
    if dist == "fixedb":
        if b is None:
            raise ConfigurationError("fixedb critical value needs b")
        return fixed_b_critical_value(b, kernel, alpha, **oracle_kwargs)
    raise ConfigurationError(f"unknown distribution {dist!r}")
