"""Seeded simulators for the Monte Carlo designs M1-M4 and a general
time-varying AR(1) path generator with regime overrides.

All generators are pure functions of (spec, seed): the same inputs give
bit-identical output. Replications should use independent substreams
derived from a base seed (see :mod:`dkhac.harness`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import ConfigurationError

__all__ = [
    "DgpSpec",
    "SlsAr1Spec",
    "MODELS",
    "sls_ar1_path",
    "gen_m1",
    "gen_m2",
    "gen_m3",
    "gen_m4",
    "simulate",
]

BURN_IN = 200
TABLE_SAMPLE_SIZES = (200, 400, 800)


@dataclass(frozen=True)
class DgpSpec:
    model: str
    T: int
    delta: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class SlsAr1Spec:
    """Time-varying AR(1): e_t = rho(t/T) e_{t-1} + sigma(t/T) z_t.

    ``overrides`` lists (start, end, rho) windows of 1-based indices,
    inclusive on both ends, inside which the AR coefficient is replaced
    (near-unit-root regimes allowed up to |rho| = 0.99).
    """

    rho: Callable[[float], float]
    sigma: Callable[[float], float]
    overrides: tuple = ()


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sls_ar1_path(spec: SlsAr1Spec, T: int, seed) -> np.ndarray:
    """Simulate one path of length T.

    A burn-in of 200 draws at the u = 0 parameters precedes the sample,
    initialized at the u = 0 stationary distribution.
    """
    from scipy.signal import lfilter

    rng = _rng(seed)
    rho0, sig0 = float(spec.rho(0.0)), float(spec.sigma(0.0))
    if abs(rho0) >= 1.0:
        raise ConfigurationError("|rho(0)| must be < 1 for stationary initialization")
    z = rng.standard_normal(BURN_IN + T)
    e0 = sig0 / math.sqrt(1.0 - rho0**2) * rng.standard_normal() if sig0 > 0 else 0.0

    t_idx = np.arange(1, T + 1)
    rho_t = np.array([spec.rho(t / T) for t in t_idx])
    sig_t = np.array([spec.sigma(t / T) for t in t_idx])
    for start, end, rho_over in spec.overrides:
        rho_t[(t_idx >= start) & (t_idx <= end)] = rho_over

    constant = np.all(rho_t == rho0) and np.all(sig_t == sig0)
    if constant:
        out, _ = lfilter([1.0], [1.0, -rho0], sig0 * z, zi=np.array([rho0 * e0]))
        return out[BURN_IN:]

    # burn-in at the u = 0 parameters, then the time-varying recursion
    pre, _ = lfilter([1.0], [1.0, -rho0], sig0 * z[:BURN_IN], zi=np.array([rho0 * e0]))
    e = pre[-1] if BURN_IN else e0
    out = np.empty(T)
    zs = sig_t * z[BURN_IN:]
    for t in range(T):
        e = rho_t[t] * e + zs[t]
        out[t] = e
    return out


def _constant_ar1(a: float, sigma: float) -> SlsAr1Spec:
    return SlsAr1Spec(rho=lambda u: a, sigma=lambda u: sigma)


def _regression_draw(T, delta, seed, *, err_a, err_sigma, beta0, delta_on, x_mean=1.0,
                     x_sd=1.0):
    rng = _rng(seed)
    x = x_mean + x_sd * rng.standard_normal(T)
    e = sls_ar1_path(_constant_ar1(err_a, err_sigma), T, rng)
    b1, b2 = beta0
    if delta_on == "intercept":
        y = (b1 + delta) + b2 * x + e
    else:
        y = b1 + (b2 + delta) * x + e
    X = np.column_stack([np.ones(T), x])
    return y, X


def gen_m1(T: int, delta: float, seed):
    """Stationary AR(1) errors (a=0.4, var 0.5), x ~ N(1,1), shift on the
    intercept; null coefficients (0, 1)."""
    return _regression_draw(T, delta, seed, err_a=0.4, err_sigma=math.sqrt(0.5),
                            beta0=(0.0, 1.0), delta_on="intercept")


def gen_m2(T: int, delta: float, seed):
    """Stationary AR(1) errors (a=0.4, var 1), x ~ N(1,1), shift on the
    slope; null coefficients (0, 0)."""
    return _regression_draw(T, delta, seed, err_a=0.4, err_sigma=1.0,
                            beta0=(0.0, 0.0), delta_on="slope")


def m3_rho(u: float) -> float:
    """Smooth AR coefficient max{0, -cos(1.5 - cos(5u))}; peaks at 0.80114."""
    return max(0.0, -math.cos(1.5 - math.cos(5.0 * u)))


def gen_m3(T: int, delta: float, seed):
    """Segmented locally stationary errors with a near-unit-root window of
    length h after 4T/5; autoregressive regressor; shift on the slope."""
    from scipy.signal import lfilter

    rng = _rng(seed)
    h = 10 if T <= 200 else 30
    start = int(4 * T / 5) + 1
    err_spec = SlsAr1Spec(rho=m3_rho, sigma=lambda u: 1.0,
                          overrides=((start, start + h - 1, 0.99),))
    # x_t = 1 + 0.6 x_{t-1} + u_t, initialized at its stationary law
    x0 = 2.5 + math.sqrt(1.0 / (1.0 - 0.36)) * rng.standard_normal()
    ux = rng.standard_normal(T)
    dev, _ = lfilter([1.0], [1.0, -0.6], ux, zi=np.array([0.6 * (x0 - 2.5)]))
    x = 2.5 + dev
    e = sls_ar1_path(err_spec, T, rng)
    y = (0.0 + delta) * x + e
    X = np.column_stack([np.ones(T), x])
    return y, X


def gen_m4(T: int, delta: float, seed):
    """Forecasting design: y_t = 1 + x_{t-1} + e_t with AR(1) errors
    (a=0.3), x ~ N(1, 1.2); delta adds a slope break after 0.7T."""
    rng = _rng(seed)
    x = 1.0 + math.sqrt(1.2) * rng.standard_normal(T + 1)  # x_0 .. x_T
    e = sls_ar1_path(_constant_ar1(0.3, 1.0), T, rng)
    xlag = x[:T]
    t_idx = np.arange(1, T + 1)
    brk = (t_idx > math.floor(0.7 * T + 1e-9)).astype(float)
    y = 1.0 + xlag + delta * xlag * brk + e
    X = np.column_stack([np.ones(T), xlag])
    return y, X


MODELS = {
    "m1": {"gen": gen_m1, "beta0": (0.0, 1.0), "statistic": "t", "coord": 0},
    "m2": {"gen": gen_m2, "beta0": (0.0, 0.0), "statistic": "t", "coord": 1},
    "m3": {"gen": gen_m3, "beta0": (0.0, 0.0), "statistic": "t", "coord": 1},
    "m4": {"gen": gen_m4, "beta0": (1.0, 1.0), "statistic": "gr", "coord": None},
}


def simulate(spec: DgpSpec):
    """Dispatch on the model tag; returns (y, X)."""
    model = spec.model.lower()
    if model not in MODELS:
        raise ConfigurationError(f"unknown model {spec.model!r}; choose from {sorted(MODELS)}")
    if spec.T not in TABLE_SAMPLE_SIZES:
        warnings.warn(f"sample size T={spec.T} is outside the tabulated set "
                      f"{TABLE_SAMPLE_SIZES}", UserWarning, stacklevel=2)
    return MODELS[model]["gen"](spec.T, spec.delta, spec.seed)
