"""Lag-smoothing and time-smoothing kernel weights and their constants.

Lag kernels weight sample autocovariances by lag; time kernels weight
observations by their position inside a rolling window on [0, 1]. Each lag
kernel carries the characteristics (q, K_q, integral of K^2) that the
MSE-optimal bandwidth formulas consume: q is the smoothness index and
K_q = lim_{x->0} (1 - K(x)) / |x|^q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoFiniteSmoothnessError

__all__ = [
    "LAG_KERNELS",
    "TIME_KERNELS",
    "K1Characteristics",
    "k1_weight",
    "k2_weight",
    "k1_characteristics",
    "QS_CURVATURE",
]

LAG_KERNELS = ("qs", "bartlett", "parzen", "tukey-hanning", "truncated")
TIME_KERNELS = ("parabolic",)

# Taylor coefficients of the quadratic spectral kernel at 0:
# K(x) = 1 - (18 pi^2/125) x^2 + (162 pi^4/21875) x^4 + O(x^6).
QS_CURVATURE = 18.0 * np.pi**2 / 125.0
_QS_X4 = 162.0 * np.pi**4 / 21875.0

# Below this the closed form loses ~1e-9 to cancellation; the series is
# accurate to O(x^6) ~ 1e-18 there, so both branches agree to ~4e-11.
_QS_SERIES_CUTOFF = 1e-3


def _qs(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    small = ax < _QS_SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    z = 1.2 * np.pi * safe
    closed = 25.0 / (12.0 * np.pi**2 * safe**2) * (np.sin(z) / z - np.cos(z))
    series = 1.0 - QS_CURVATURE * x**2 + _QS_X4 * x**4
    return np.where(small, series, closed)


def _bartlett(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return np.where(ax < 1.0, 1.0 - ax, 0.0)


def _parzen(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    inner = 1.0 - 6.0 * ax**2 + 6.0 * ax**3
    outer = 2.0 * (1.0 - ax) ** 3
    return np.where(ax <= 0.5, inner, np.where(ax <= 1.0, outer, 0.0))


def _tukey_hanning(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return np.where(ax <= 1.0, 0.5 * (1.0 + np.cos(np.pi * x)), 0.0)


def _truncated(x: np.ndarray) -> np.ndarray:
    return np.where(np.abs(x) <= 1.0, 1.0, 0.0)


_K1_FUNCS = {
    "qs": _qs,
    "bartlett": _bartlett,
    "parzen": _parzen,
    "tukey-hanning": _tukey_hanning,
    "truncated": _truncated,
}


def parabolic(x) -> np.ndarray:
    """Time kernel 6x(1-x) on [0, 1], zero elsewhere; integrates to 1."""
    x = np.asarray(x, dtype=float)
    out = np.where((x >= 0.0) & (x <= 1.0), 6.0 * x * (1.0 - x), 0.0)
    return out if out.ndim else float(out)


_K2_FUNCS = {"parabolic": parabolic}


def _lookup(table, kind, what):
    try:
        return table[kind]
    except KeyError:
        raise ValueError(f"unknown {what} kernel {kind!r}; choose from {sorted(table)}") from None


def k1_weight(kind: str, x):
    """Evaluate the lag kernel ``kind`` at ``x`` (scalar or array).

    Total on all finite inputs; the QS kernel switches to a Taylor branch
    near zero to avoid cancellation in the closed form.
    """
    func = _lookup(_K1_FUNCS, kind, "lag")
    out = func(np.asarray(x, dtype=float))
    return out if out.ndim else float(out)


def k2_weight(kind: str, x):
    """Evaluate the time kernel ``kind`` at ``x`` (scalar or array)."""
    func = _lookup(_K2_FUNCS, kind, "time")
    return func(x)


def k2_function(kind_or_callable):
    """Resolve a time kernel name or pass a callable through unchanged."""
    if callable(kind_or_callable):
        return kind_or_callable
    return _lookup(_K2_FUNCS, kind_or_callable, "time")


@dataclass(frozen=True)
class K1Characteristics:
    """Constants of a lag kernel used by plug-in bandwidth formulas."""

    q: int
    k1q: float
    l2norm: float


_CHARACTERISTICS = {
    "qs": K1Characteristics(q=2, k1q=QS_CURVATURE, l2norm=1.0),
    "bartlett": K1Characteristics(q=1, k1q=1.0, l2norm=2.0 / 3.0),
    "parzen": K1Characteristics(q=2, k1q=6.0, l2norm=151.0 / 280.0),
    "tukey-hanning": K1Characteristics(q=2, k1q=np.pi**2 / 4.0, l2norm=0.75),
}


def k1_characteristics(kind: str) -> K1Characteristics:
    """Return (q, K_q, integral of K^2) for a lag kernel.

    The truncated kernel has 1 - K(x) = 0 near zero, so K_q vanishes for
    every q > 0 and no finite smoothness constant exists.
    """
    if kind == "truncated":
        raise NoFiniteSmoothnessError(
            "truncated kernel has no finite smoothness constant; "
            "plug-in bandwidth rules are undefined for it"
        )
    if kind not in _K1_FUNCS:
        raise ValueError(f"unknown lag kernel {kind!r}")
    return _CHARACTERISTICS[kind]
