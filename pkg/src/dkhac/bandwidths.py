"""Data-dependent bandwidth selection.

Provides the joint MSE-optimal plug-in pair (b1, b2) for the
double-kernel estimator, the Andrews AR(1) plug-in for classical kernel
HAC, the Newey-West (1994) automatic bandwidth, and the asymptotic
relative-MSE objective used to cross-check the closed-form optimum.

The joint plug-in approximates each score series by a rolling AR(1) fit,
turns those fits into spectrum-level and curvature summaries, and plugs
them into

    b1 = 0.46 * phi1^(1/24) * T^(-1/6),   b2 = 3.56 * phi2^(1/24) * T^(-1/6).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import check_scores
from .exceptions import ConfigurationError, DegenerateDataWarning
from .kernels import k1_characteristics

__all__ = [
    "AR_CLIP_DEFAULT",
    "DEFAULT_FREQ_GRID",
    "LocalAr1Fits",
    "PluginQuantities",
    "BandwidthPair",
    "fit_local_ar1",
    "reference_curvature",
    "curvature_average",
    "plugin_factors",
    "joint_bandwidths",
    "joint_plugin_bandwidths",
    "andrews_alpha",
    "andrews_bandwidth",
    "newey_west_bandwidth",
    "asymptotic_remse",
    "remse_optimal_pair",
]

AR_CLIP_DEFAULT = 0.97

# frequency grid used to average the curvature integrand over [-pi, pi]
DEFAULT_FREQ_GRID = (-math.pi, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, math.pi)


@dataclass(frozen=True)
class LocalAr1Fits:
    """Rolling AR(1) fits of one series on left-aligned windows.

    ``starts`` holds the 0-based block-start indices the fits are anchored
    at; ``a1`` the clipped AR coefficients; ``sigma`` the root mean squared
    residuals; ``degenerate`` marks all-zero windows.
    """

    starts: np.ndarray
    a1: np.ndarray
    sigma: np.ndarray
    degenerate: np.ndarray
    window: int


@dataclass(frozen=True)
class PluginQuantities:
    """Scalar summaries feeding the joint bandwidth formulas.

    phi_time aggregates squared time-variation of the autocovariance
    relative to the spectrum level; phi_freq aggregates squared spectral
    curvature at frequency zero. lag_factor = phi_time/phi_freq^5 drives
    b1, time_factor = phi_freq/phi_time^5 drives b2. ``curvature`` holds
    the per-series averaged curvature term; ``fallback`` flags the
    zero-curvature default.
    """

    phi_time: float
    phi_freq: float
    lag_factor: float
    time_factor: float
    curvature: np.ndarray
    fallback: bool = False


@dataclass(frozen=True)
class BandwidthPair:
    b1: float
    b2: float


def default_block_length(T: int) -> int:
    """Rolling window / block length n = floor(T^0.66)."""
    return max(2, int(np.floor(T**0.66)))


def _ar1_window_fit(v: np.ndarray, clip: float):
    """LS AR(1) on one window: a = sum v_j v_{j-1} / sum v_{j-1}^2.

    sigma is the innovation scale, the root mean squared residual at the
    clipped coefficient. Normalizing by the window length keeps the
    spectrum-level summaries free of the window size; the raw residual sum
    would shrink the curvature factor like 1/n^2 and push the time
    bandwidth to its upper clip, where the one-sided windows lose around
    half their mass off the sample edge.
    """
    num = float(v[1:] @ v[:-1])
    den = float(v[:-1] @ v[:-1])
    if den == 0.0:
        return 0.0, 0.0, True
    a = min(max(num / den, -clip), clip)
    resid = v[1:] - a * v[:-1]
    return a, float(np.sqrt(resid @ resid / resid.size)), False


def fit_local_ar1(V, series: int, n2: int, n3: int | None = None,
                  clip: float = AR_CLIP_DEFAULT) -> LocalAr1Fits:
    """Rolling AR(1) fits of score series ``series`` on the block grid.

    Windows end at the block starts j*n3 (j = 0 .. floor(T/n3)-1) and use
    the n2 observations to the left; starts with insufficient history are
    clamped to the earliest full window. All-zero windows yield
    (a1, sigma) = (0, 0) and are flagged degenerate.
    """
    V = check_scores(V)
    T = V.shape[0]
    n2 = int(n2)
    if n2 < 4 or n2 > T - 1:
        raise ConfigurationError(f"window n2 must satisfy 4 <= n2 <= T-1, got {n2}")
    n3 = n2 if n3 is None else int(n3)
    v = V[:, series]
    starts = np.arange(T // n3, dtype=int) * n3
    a1 = np.empty(starts.size)
    sigma = np.empty(starts.size)
    degenerate = np.zeros(starts.size, dtype=bool)
    for i, t0 in enumerate(starts):
        end = max(int(t0), n2)  # inclusive window end, needs n2 lagged pairs
        a1[i], sigma[i], degenerate[i] = _ar1_window_fit(v[end - n2 : end + 1], clip)
    return LocalAr1Fits(starts=starts, a1=a1, sigma=sigma, degenerate=degenerate, window=n2)


def reference_curvature(u: float, k: int, freq_grid=DEFAULT_FREQ_GRID) -> float:
    """Second time-derivative of the reference local autocovariance.

    Deterministic grid average over the supplied frequencies of the
    curvature integrand of a time-varying AR(1) with coefficient
    a(u) = 0.8(cos 1.5 + cos 4 pi u) and unit innovation scale; the real
    part is returned (the imaginary part cancels on symmetric grids).
    """
    w = np.asarray(freq_grid, dtype=float)
    if w.size == 0:
        raise ConfigurationError("frequency grid is empty")
    a = 0.8 * (math.cos(1.5) + math.cos(4.0 * math.pi * u))
    e = np.exp(-1j * w)
    base = 1.0 + a * e
    slope = 0.8 * (-4.0 * math.pi * math.sin(4.0 * math.pi * u))
    curve = 0.8 * (-16.0 * math.pi**2 * math.cos(4.0 * math.pi * u))
    integrand = (3.0 / math.pi) * base**-4.0 * slope * e \
        - (1.0 / math.pi) * np.abs(base) ** -3.0 * curve * e
    return float(np.mean(np.exp(1j * k * w) * integrand).real)


@lru_cache(maxsize=128)
def curvature_average(T: int, n3: int, freq_grid=DEFAULT_FREQ_GRID) -> float:
    """Curvature term summed over lags |k| <= floor(T^(1/6)) and averaged
    over the block grid j*n3/T, j = 0 .. floor(T/n3). Depends only on
    (T, n3, grid), never on data."""
    kmax = int(np.floor(T ** (1.0 / 6.0)))
    total = 0.0
    for k in range(-kmax, kmax + 1):
        inner = sum(reference_curvature(j * n3 / T, k, freq_grid) for j in range(T // n3 + 1))
        total += (n3 / T) * inner
    return total


def plugin_factors(fits, curvature, weights, n3: int, T: int) -> PluginQuantities:
    """Combine per-series AR(1) fits and curvature terms into the plug-in
    scalars.

    For each series, D = block-average of sigma^2 (1-a)^-2 estimates the
    spectrum level (times 2 pi) and N = block-average of
    sigma^2 a (1-a)^-4 its curvature at frequency zero; then

        phi_time = (4 pi)^-2 sum_r W_r curvature_r^2 / D_r^2,
        phi_freq = 36 sum_r W_r (N_r / D_r)^2.

    All-zero AR coefficients give phi_freq = 0; callers fall back to the
    unit-plug-in pair.
    """
    curvature = np.atleast_1d(np.asarray(curvature, dtype=float))
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    phi_time = 0.0
    phi_freq = 0.0
    for r, fit in enumerate(fits):
        if fit.degenerate.all():
            raise ConfigurationError(f"series {r}: every fitting window is degenerate")
        s2 = fit.sigma**2
        one_minus = 1.0 - fit.a1
        d = (n3 / T) * float(np.sum(s2 * one_minus**-2.0))
        n_ = (n3 / T) * float(np.sum(s2 * fit.a1 * one_minus**-4.0))
        phi_time += weights[r] * curvature[r] ** 2 / d**2
        phi_freq += weights[r] * (n_ / d) ** 2
    phi_time /= (4.0 * math.pi) ** 2
    phi_freq *= 36.0
    if phi_freq == 0.0 or phi_time == 0.0:
        return PluginQuantities(phi_time=phi_time, phi_freq=phi_freq,
                                lag_factor=np.nan, time_factor=np.nan,
                                curvature=curvature, fallback=True)
    return PluginQuantities(
        phi_time=phi_time,
        phi_freq=phi_freq,
        lag_factor=phi_time / phi_freq**5,
        time_factor=phi_freq / phi_time**5,
        curvature=curvature,
    )


def _clip_bandwidth(b: float, T: int) -> float:
    return float(np.clip(b, 1.0 / T, 1.0))


def joint_bandwidths(pq: PluginQuantities, T: int) -> BandwidthPair:
    """Plug the factors into b1 = 0.46 phi1^(1/24) T^(-1/6) and
    b2 = 3.56 phi2^(1/24) T^(-1/6), clipped to [1/T, 1]."""
    rate = float(T) ** (-1.0 / 6.0)
    if pq.fallback or not (np.isfinite(pq.lag_factor) and np.isfinite(pq.time_factor)):
        warnings.warn("zero-curvature plug-in; using unit-factor bandwidths",
                      DegenerateDataWarning, stacklevel=2)
        return BandwidthPair(_clip_bandwidth(0.46 * rate, T), _clip_bandwidth(3.56 * rate, T))
    b1 = 0.46 * pq.lag_factor ** (1.0 / 24.0) * rate
    b2 = 3.56 * pq.time_factor ** (1.0 / 24.0) * rate
    return BandwidthPair(_clip_bandwidth(b1, T), _clip_bandwidth(b2, T))


def joint_plugin_bandwidths(V, block_length: int | None = None, weights=None,
                            freq_grid=DEFAULT_FREQ_GRID, clip: float = AR_CLIP_DEFAULT,
                            standardize: bool = True):
    """Full data-dependent pipeline: scores -> (BandwidthPair, PluginQuantities).

    Each series is standardized by its sample sd first, which makes the
    selected bandwidths exactly invariant to rescaling the data; the
    curvature term is data-independent so the raw formulas are not.
    """
    V = check_scores(V)
    T, p = V.shape
    n = default_block_length(T) if block_length is None else int(block_length)
    if standardize:
        sd = V.std(axis=0)
        scale = np.where(sd > 0, sd, 1.0)
        V = V / scale
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (p,):
        raise ConfigurationError(f"weights must have shape ({p},)")
    fits = [fit_local_ar1(V, r, n2=n, n3=n, clip=clip) for r in range(p)]
    curve = np.full(p, curvature_average(T, n, tuple(freq_grid)))
    pq = plugin_factors(fits, curve, w, n3=n, T=T)
    return joint_bandwidths(pq, T), pq


def _alpha_from_ar1(a1, sigma, weights, q: int) -> float:
    a1 = np.atleast_1d(np.asarray(a1, dtype=float))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    s4 = sigma**4.0
    den = np.sum(w * s4 / (1.0 - a1) ** 4.0)
    if q == 2:
        num = np.sum(w * 4.0 * a1**2 * s4 / (1.0 - a1) ** 8.0)
    elif q == 1:
        num = np.sum(w * 4.0 * a1**2 * s4 / ((1.0 - a1) ** 6.0 * (1.0 + a1) ** 2.0))
    else:
        raise ConfigurationError(f"alpha is defined for q in {{1, 2}}, got {q}")
    if den == 0.0:
        raise ConfigurationError("alpha undefined: zero denominator")
    return float(num / den)


def andrews_alpha(V, q: int, weights=None, clip: float = AR_CLIP_DEFAULT) -> float:
    """AR(1) plug-in alpha(q) from full-sample per-series fits."""
    V = check_scores(V)
    T, p = V.shape
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    a1 = np.empty(p)
    sigma = np.empty(p)
    for r in range(p):
        a1[r], sigma[r], _ = _ar1_window_fit(V[:, r], clip)
    return _alpha_from_ar1(a1, sigma, w, q)


def andrews_bandwidth(alpha: float, q: int, kernel: str, T: int) -> float:
    """Classical plug-in b = (q K_q^2 alpha T / int K^2)^(-1/(2q+1)).

    alpha = 0 (no detectable dependence) warns and returns maximal
    smoothing b = 1.
    """
    ch = k1_characteristics(kernel)
    if q != ch.q:
        raise ConfigurationError(f"kernel {kernel!r} has q={ch.q}, got q={q}")
    if alpha <= 0.0:
        warnings.warn("alpha <= 0; returning b = 1 (maximal smoothing)",
                      DegenerateDataWarning, stacklevel=2)
        return 1.0
    b = (q * ch.k1q**2 * alpha * T / ch.l2norm) ** (-1.0 / (2.0 * q + 1.0))
    return float(np.clip(b, 1.0 / T, 1.0))


def newey_west_bandwidth(V) -> float:
    """Automatic Bartlett bandwidth, returned as b1 = 1/(m+1).

    Standard nonparametric recipe: pilot lag count n = floor(4 (T/100)^(2/9))
    on the unit-weighted sum of the score columns, then
    m = floor(1.1447 ((s1/s0)^2 T)^(1/3)).
    """
    V = check_scores(V)
    T = V.shape[0]
    h = V.sum(axis=1)
    n = int(np.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))
    sig = np.array([h[j:] @ h[: T - j] / T for j in range(n + 1)])
    s0 = sig[0] + 2.0 * sig[1:].sum()
    s1 = 2.0 * np.sum(np.arange(1, n + 1) * sig[1:])
    if not np.isfinite(s0) or s0 <= 0.0:
        m = 0
    else:
        gamma = 1.1447 * ((s1 / s0) ** 2) ** (1.0 / 3.0)
        m = int(np.floor(gamma * T ** (1.0 / 3.0)))
        m = min(m, T - 2)
    return 1.0 / (m + 1.0)


def asymptotic_remse(pi1: float, pi2: float, pi3: float,
                     b1: float, b2: float, T: int) -> float:
    """Asymptotic relative-MSE objective (T b1 b2)^-1 pi3 + (b1^2 pi1 + b2^2 pi2)^2."""
    if b1 <= 0.0 or b2 <= 0.0 or T < 1:
        raise ConfigurationError("bandwidths and T must be positive")
    return pi3 / (T * b1 * b2) + (b1**2 * pi1 + b2**2 * pi2) ** 2


def remse_optimal_pair(pi1: float, pi2: float, pi3: float, T: int) -> BandwidthPair:
    """Closed-form minimizer of :func:`asymptotic_remse` for q = 2:

        b1 = (pi2/pi1^5)^(1/12) (pi3/(8T))^(1/6),
        b2 = (pi1/pi2^5)^(1/12) (pi3/(8T))^(1/6).
    """
    scale = (pi3 / (8.0 * T)) ** (1.0 / 6.0)
    return BandwidthPair(
        b1=float((pi2 / pi1**5) ** (1.0 / 12.0) * scale),
        b2=float((pi1 / pi2**5) ** (1.0 / 12.0) * scale),
    )
