"""Long-run variance estimators.

Functional core (``dk_hac``, ``classical_hac``, ``ewc``, ``psd_project``)
returning :class:`LrvEstimate`, plus sklearn-style wrappers
(:class:`DoubleKernelHAC`, :class:`KernelHAC`, :class:`EWC`) that expose
``fit`` / ``covariance_`` / ``get_params`` so the estimators compose with
the wider ecosystem.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import bandwidths as bw
from ._validation import check_scores
from .exceptions import ConfigurationError, NumericError
from .kernels import k1_characteristics, k1_weight
from .local_cov import SmoothingPlan, _gamma_from_profile, aggregate_time_weights

__all__ = [
    "LrvEstimate",
    "dk_hac",
    "classical_hac",
    "ewc",
    "psd_project",
    "DoubleKernelHAC",
    "KernelHAC",
    "EWC",
]


@dataclass(frozen=True)
class LrvEstimate:
    """A p x p long-run variance estimate with provenance.

    ``J`` is symmetrized on construction; ``df`` is the equivalent degrees
    of freedom (cosine estimator only); ``psd_repaired``/``min_eig`` track
    the eigenvalue-clip repair.
    """

    J: np.ndarray
    kind: str
    b1: float | None = None
    b2: float | None = None
    block_length: int | None = None
    df: int | None = None
    psd_repaired: bool = False
    min_eig: float = np.nan

    @property
    def shape(self):
        return self.J.shape


def _finalize(J, kind, **meta) -> LrvEstimate:
    J = 0.5 * (J + J.T)
    min_eig = float(np.linalg.eigvalsh(J).min()) if J.size else np.nan
    return LrvEstimate(J=J, kind=kind, min_eig=min_eig, **meta)


def _locate_nonfinite(V, plan, time_kernel):
    # diagnostic pass, only reached after a nonfinite total
    from .local_cov import block_avg_autocov

    T = V.shape[0]
    for k in range(T):
        G = block_avg_autocov(V, k, plan, time_kernel)
        if not np.isfinite(G).all():
            return k
    return None


def dk_hac(V, plan: SmoothingPlan, lag_kernel: str = "qs",
           time_kernel: str = "parabolic") -> LrvEstimate:
    """Double-kernel estimate sum_k K1(b1 k) Gamma(k) over |k| <= T-1.

    Gamma(-k) = Gamma(k)' exactly, so the signed sum is assembled from
    nonnegative lags; zero lag weights (compact-support kernels) are
    skipped. Nonfinite totals raise :class:`NumericError` tagged with the
    offending lag.
    """
    V = check_scores(V)
    T, p = V.shape
    plan.validate(T)
    n = int(plan.block_length)
    g = aggregate_time_weights(T, plan.b2, n, time_kernel)
    lag_w = np.atleast_1d(k1_weight(lag_kernel, plan.b1 * np.arange(T)))
    J = np.zeros((p, p))
    for k in range(T):
        w = lag_w[k]
        if w == 0.0:
            continue
        G = _gamma_from_profile(V, k, g, plan.b2, n)
        J += w * G if k == 0 else w * (G + G.T)
    if plan.dof_adjust:
        J *= T / (T - p)
    if not np.isfinite(J).all():
        k_bad = _locate_nonfinite(V, plan, time_kernel)
        raise NumericError("nonfinite double-kernel estimate", lag=k_bad)
    return _finalize(J, kind="dk-hac", b1=plan.b1, b2=plan.b2, block_length=n)


def classical_hac(V, b1: float, lag_kernel: str = "bartlett",
                  dof_adjust: bool = True) -> LrvEstimate:
    """Classical kernel estimate sum_k K1(b1 k) Gamma_cla(k).

    b1 may exceed 1 (heavier truncation than one lag); zero lag weights
    are skipped.
    """
    V = check_scores(V)
    T, p = V.shape
    if not b1 > 0.0:
        raise ConfigurationError(f"b1 must be positive, got {b1}")
    lag_w = np.atleast_1d(k1_weight(lag_kernel, b1 * np.arange(T)))
    J = np.zeros((p, p))
    for k in range(T):
        w = lag_w[k]
        if w == 0.0:
            continue
        G = V[k:].T @ V[: T - k] / T
        J += w * G if k == 0 else w * (G + G.T)
    if dof_adjust:
        J *= T / (T - p)
    if not np.isfinite(J).all():
        raise NumericError("nonfinite classical estimate")
    return _finalize(J, kind=f"hac-{lag_kernel}", b1=float(b1))


def ewc(V, n_terms: int) -> LrvEstimate:
    """Cosine-projection estimate: average of B squared type-II cosine
    coefficients of the scores; PSD by construction with df = B."""
    V = check_scores(V)
    T, _ = V.shape
    B = int(n_terms)
    if not 1 <= B < T:
        raise ConfigurationError(f"need 1 <= B < T, got B={B}, T={T}")
    t = np.arange(1, T + 1) - 0.5
    C = np.cos(np.pi * np.outer(np.arange(1, B + 1), t) / T)
    Lam = np.sqrt(2.0 / T) * (C @ V)
    return _finalize(Lam.T @ Lam / B, kind="ewc", df=B)


def ewc_default_terms(T: int) -> int:
    """Conventional rate B = max(1, floor(0.4 T^(2/3)))."""
    return max(1, int(np.floor(0.4 * T ** (2.0 / 3.0))))


def psd_project(est: LrvEstimate, floor: float = 0.0) -> LrvEstimate:
    """Clip eigenvalues of the estimate at ``floor`` (>= 0).

    Marks the estimate repaired only when some eigenvalue was raised; the
    pre-repair minimum eigenvalue is preserved in ``min_eig``.
    """
    if floor < 0.0:
        raise ConfigurationError("floor must be nonnegative")
    vals, vecs = np.linalg.eigh(est.J)
    if vals.min() >= floor:
        return est
    clipped = np.maximum(vals, floor)
    J = (vecs * clipped) @ vecs.T
    return replace(est, J=0.5 * (J + J.T), psd_repaired=True, min_eig=float(vals.min()))


class _FittedLrvMixin:
    """Shared post-fit surface of the estimator classes."""

    def _set_result(self, result: LrvEstimate):
        self.result_ = result
        self.covariance_ = result.J
        self.n_features_in_ = result.J.shape[0]
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")


class DoubleKernelHAC(BaseEstimator, _FittedLrvMixin):
    """Long-run variance estimator smoothing over lags and over time.

    Parameters
    ----------
    bandwidth : "plug-in" or (b1, b2)
        Joint data-dependent selection, or a fixed pair of fractions.
    lag_kernel, time_kernel : str
        Kernel names; the MSE-optimal choices are the defaults.
    block_length : int, optional
        Segment length n; defaults to floor(T^0.66).
    dof_adjust : bool
        Apply the small-sample T/(T-p) factor.
    weights : array, optional
        Per-series weights of the plug-in criterion (default all ones).

    Attributes
    ----------
    covariance_ : ndarray of shape (p, p)
    b1_, b2_ : float
    plugin_ : PluginQuantities or None
    """

    def __init__(self, bandwidth="plug-in", lag_kernel="qs", time_kernel="parabolic",
                 block_length=None, dof_adjust=True, weights=None):
        self.bandwidth = bandwidth
        self.lag_kernel = lag_kernel
        self.time_kernel = time_kernel
        self.block_length = block_length
        self.dof_adjust = dof_adjust
        self.weights = weights

    def fit(self, X, y=None):
        V = check_scores(X)
        T = V.shape[0]
        n = bw.default_block_length(T) if self.block_length is None else int(self.block_length)
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "plug-in":
                raise ConfigurationError(f"unknown bandwidth rule {self.bandwidth!r}")
            pair, pq = bw.joint_plugin_bandwidths(V, block_length=n, weights=self.weights)
            self.plugin_ = pq
        else:
            b1, b2 = self.bandwidth
            pair = bw.BandwidthPair(float(b1), float(b2))
            self.plugin_ = None
        plan = SmoothingPlan(b1=pair.b1, b2=pair.b2, block_length=n,
                             dof_adjust=self.dof_adjust)
        self.b1_, self.b2_ = pair.b1, pair.b2
        self.block_length_ = n
        return self._set_result(dk_hac(V, plan, self.lag_kernel, self.time_kernel))


class KernelHAC(BaseEstimator, _FittedLrvMixin):
    """Classical kernel long-run variance estimator.

    ``bandwidth`` is "newey-west" (automatic Bartlett rule), "andrews"
    (AR(1) plug-in for the configured kernel), or a fixed fraction.
    """

    def __init__(self, kernel="bartlett", bandwidth="newey-west", dof_adjust=True,
                 weights=None):
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.dof_adjust = dof_adjust
        self.weights = weights

    def fit(self, X, y=None):
        V = check_scores(X)
        T = V.shape[0]
        if isinstance(self.bandwidth, str):
            if self.bandwidth == "newey-west":
                if self.kernel != "bartlett":
                    raise ConfigurationError("newey-west rule is for the bartlett kernel")
                b1 = bw.newey_west_bandwidth(V)
            elif self.bandwidth == "andrews":
                q = k1_characteristics(self.kernel).q
                alpha = bw.andrews_alpha(V, q, weights=self.weights)
                b1 = bw.andrews_bandwidth(alpha, q, self.kernel, T)
            else:
                raise ConfigurationError(f"unknown bandwidth rule {self.bandwidth!r}")
        else:
            b1 = float(self.bandwidth)
        self.b1_ = b1
        return self._set_result(classical_hac(V, b1, self.kernel, self.dof_adjust))


class EWC(BaseEstimator, _FittedLrvMixin):
    """Cosine-projection long-run variance estimator with Student-t df."""

    def __init__(self, n_terms=None):
        self.n_terms = n_terms

    def fit(self, X, y=None):
        V = check_scores(X)
        B = ewc_default_terms(V.shape[0]) if self.n_terms is None else int(self.n_terms)
        self.df_ = B
        return self._set_result(ewc(V, B))
