"""Input validation helpers."""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigurationError


def check_scores(X) -> np.ndarray:
    """Coerce ``X`` to a T x p float array of score observations.

    1-D input is treated as a single series. Requires finite entries,
    p >= 1 and T >= 2p.
    """
    V = np.asarray(X, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    if V.ndim != 2:
        raise ConfigurationError(f"scores must be 1-D or 2-D, got ndim={V.ndim}")
    T, p = V.shape
    if p < 1 or T < 2 * p:
        raise ConfigurationError(f"need T >= 2p and p >= 1, got T={T}, p={p}")
    if not np.isfinite(V).all():
        raise ConfigurationError("scores contain nonfinite entries")
    return V


def check_lag(k: int, T: int) -> int:
    k = int(k)
    if abs(k) > T - 1:
        raise ConfigurationError(f"lag {k} out of range for T={T}")
    return k


def check_in_open_unit(name: str, value: float, upper_closed: bool = False) -> float:
    value = float(value)
    ok = 0.0 < value < 1.0 or (upper_closed and value == 1.0)
    if not ok:
        hi = "1]" if upper_closed else "1)"
        raise ConfigurationError(f"{name} must lie in (0, {hi}, got {value}")
    return value
