"""Time-localized and classical sample autocovariances.

The local estimator at block r and lag k >= 0 is

    chat(r n/T, k) = (T b2)^-1 sum_{s=k+1}^{T} K2(((r+1) n - (s - k/2)) / (T b2)) V_s V'_{s-k}

with the mirrored form (V_{s+k} V'_s, sum from s = -k+1) for k < 0. Block
averaging gives

    Gamma(k) = n/(T - n) * sum_{r=0}^{floor((T-n)/n)} chat(r n/T, k),

and the classical autocovariance drops the time weighting entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_in_open_unit, check_lag, check_scores
from .exceptions import ConfigurationError
from .kernels import k2_function

__all__ = [
    "SmoothingPlan",
    "local_autocov",
    "block_avg_autocov",
    "classical_autocov",
    "aggregate_time_weights",
]


@dataclass(frozen=True)
class SmoothingPlan:
    """Bandwidths and block length for the double-smoothing estimator.

    b1 is the lag-smoothing bandwidth fraction, b2 the time-smoothing
    bandwidth fraction, block_length the segment length n used for the
    block average. ``dof_adjust`` applies the optional small-sample
    T/(T-p) factor.
    """

    b1: float
    b2: float
    block_length: int
    dof_adjust: bool = True

    def validate(self, T: int) -> None:
        check_in_open_unit("b1", self.b1, upper_closed=True)
        check_in_open_unit("b2", self.b2, upper_closed=True)
        n = int(self.block_length)
        if not 1 <= n < T:
            raise ConfigurationError(f"block_length must satisfy 1 <= n < T, got n={n}, T={T}")
        if T * self.b2 < 1.0:
            raise ConfigurationError(f"time window T*b2 = {T * self.b2:.3g} covers no observation")


def n_blocks(T: int, block_length: int) -> int:
    """Number of block summands, floor((T - n)/n) + 1."""
    return (T - block_length) // block_length + 1


def _weights_at_block(T, b2, block_length, r, k, k2):
    # weight of the product at 1-based time s, pair midpoint m = s - |k|/2
    s = np.arange(abs(k) + 1, T + 1, dtype=float)
    arg = ((r + 1) * block_length - (s - abs(k) / 2.0)) / (T * b2)
    return k2(arg)


def local_autocov(V, r: int, k: int, b2: float, block_length: int, time_kernel="parabolic"):
    """Local autocovariance estimate at block index r and lag k.

    ``time_kernel`` may be a registered kernel name or any callable weight
    function (used by degenerate-case tests with a flat surrogate).
    """
    V = check_scores(V)
    T, _ = V.shape
    k = check_lag(k, T)
    check_in_open_unit("b2", b2, upper_closed=True)
    r_max = (T - block_length) // block_length
    if not 0 <= r <= r_max:
        raise ConfigurationError(f"block index r={r} outside 0..{r_max}")
    k2 = k2_function(time_kernel)
    w = _weights_at_block(T, b2, block_length, r, k, k2)
    lead, lag_ = (V[abs(k):], V[: T - abs(k)])
    G = (lead * w[:, None]).T @ lag_ / (T * b2)
    return G if k >= 0 else G.T


def aggregate_time_weights(T, b2, block_length, time_kernel="parabolic"):
    """Sum of block weights on the half-integer midpoint grid.

    Returns g with g[j] = sum_r K2(((r+1) n - j/2) / (T b2)), j = 0..2T,
    so the weight of the lag-k product at time s is g[2s - k]. Shared by
    every lag, which lets the estimator reuse one profile.
    """
    k2 = k2_function(time_kernel)
    ends = (np.arange(n_blocks(T, block_length), dtype=float) + 1.0) * block_length
    midpoints = np.arange(2 * T + 1, dtype=float) / 2.0
    args = (ends[:, None] - midpoints[None, :]) / (T * b2)
    return k2(args).sum(axis=0)


def block_avg_autocov(V, k: int, plan: SmoothingPlan, time_kernel="parabolic"):
    """Average of local autocovariances over blocks, Gamma(k)."""
    V = check_scores(V)
    T, _ = V.shape
    k = check_lag(k, T)
    plan.validate(T)
    n = int(plan.block_length)
    g = aggregate_time_weights(T, plan.b2, n, time_kernel)
    G = _gamma_from_profile(V, abs(k), g, plan.b2, n)
    return G if k >= 0 else G.T


def _gamma_from_profile(V, k, g, b2, block_length, block_norm="display"):
    # k >= 0; g from aggregate_time_weights
    T = V.shape[0]
    w = g[k + 2 : 2 * T - k + 1 : 2]
    G = (V[k:] * w[:, None]).T @ V[: T - k] / (T * b2)
    if block_norm == "display":
        return G * (block_length / (T - block_length))
    if block_norm == "proof":
        return G * (block_length / T)
    raise ConfigurationError(f"unknown block_norm {block_norm!r}")


def classical_autocov(V, k: int):
    """Full-sample autocovariance T^-1 sum V_t V'_{t-k}."""
    V = check_scores(V)
    T, _ = V.shape
    k = check_lag(k, T)
    G = V[abs(k):].T @ V[: T - abs(k)] / T
    return G if k >= 0 else G.T
