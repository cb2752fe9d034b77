import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from dkhac.exceptions import NoFiniteSmoothnessError
from dkhac.kernels import (
    LAG_KERNELS,
    QS_CURVATURE,
    _QS_SERIES_CUTOFF,
    k1_characteristics,
    k1_weight,
    k2_weight,
)

# golden value frozen from a direct evaluation of the closed form
QS_AT_ONE = 0.13786058167459359


def test_k1_trivial_values():
    assert k1_weight("qs", 0.0) == 1.0
    assert k1_weight("bartlett", 0.5) == 0.5
    assert k1_weight("bartlett", 1.5) == 0.0
    assert k1_weight("truncated", 0.99) == 1.0
    assert k1_weight("truncated", 1.01) == 0.0


def test_qs_golden_value():
    assert_allclose(k1_weight("qs", 1.0), QS_AT_ONE, rtol=1e-14)


def test_k2_values():
    assert k2_weight("parabolic", 0.5) == 1.5
    assert k2_weight("parabolic", 0.0) == 0.0
    assert k2_weight("parabolic", 1.2) == 0.0
    assert k2_weight("parabolic", -0.1) == 0.0


def test_k1_symmetry_exact():
    rng = np.random.default_rng(7)
    x = rng.uniform(-5, 5, size=1000)
    for kind in LAG_KERNELS:
        assert np.array_equal(k1_weight(kind, x), k1_weight(kind, -x))


def test_k1_bounded_by_one():
    x = np.linspace(-30, 30, 20001)
    for kind in LAG_KERNELS:
        assert np.max(np.abs(k1_weight(kind, x))) <= 1.0 + 1e-15


def test_k1_at_zero_is_one():
    for kind in LAG_KERNELS:
        assert k1_weight(kind, 0.0) == 1.0


def test_k2_moment_quadratures():
    val, _ = integrate.quad(lambda x: k2_weight("parabolic", x), 0, 1)
    assert abs(val - 1.0) < 1e-10
    val, _ = integrate.quad(lambda x: x**2 * k2_weight("parabolic", x), 0, 1)
    assert abs(val - 0.3) < 1e-10
    val, _ = integrate.quad(lambda x: k2_weight("parabolic", x) ** 2, 0, 1)
    assert abs(val - 1.2) < 1e-10


def test_k2_reflection_symmetry():
    x = np.linspace(0, 1, 101)
    assert_allclose(k2_weight("parabolic", x), k2_weight("parabolic", 1 - x), atol=1e-15)


def test_qs_continuity_at_zero():
    assert abs(k1_weight("qs", 1e-5) - 1.0) < 1e-8
    # series and closed form agree at the branch switch point
    eps = 1e-12
    series_side = k1_weight("qs", _QS_SERIES_CUTOFF - eps)
    closed_side = k1_weight("qs", _QS_SERIES_CUTOFF + eps)
    assert abs(series_side - closed_side) < 1e-10


def test_bartlett_characteristics_exact():
    ch = k1_characteristics("bartlett")
    assert ch.q == 1
    assert ch.k1q == 1.0
    assert ch.l2norm == 2.0 / 3.0


def test_qs_characteristics_against_oracles():
    ch = k1_characteristics("qs")
    assert ch.q == 2
    # smoothness constant via the limit (1 - K(x)) / x^2 of the closed form
    x = 1e-3
    limit = (1.0 - k1_weight("qs", x + 0.5e-3)) / (x + 0.5e-3) ** 2
    assert_allclose(ch.k1q, QS_CURVATURE, rtol=0)
    assert_allclose(limit, ch.k1q, rtol=1e-5)
    # squared integral by adaptive quadrature (tail beyond 200 is < 2e-9)
    val, _ = integrate.quad(lambda t: k1_weight("qs", t) ** 2, 0, 200, limit=2000)
    assert abs(2 * val - ch.l2norm) < 1e-6


def test_parzen_characteristics():
    ch = k1_characteristics("parzen")
    assert ch.q == 2
    assert ch.k1q == 6.0
    assert_allclose(ch.l2norm, 0.539285714285714, rtol=1e-12)
    val, _ = integrate.quad(lambda t: k1_weight("parzen", t) ** 2, -1, 1)
    assert_allclose(val, ch.l2norm, atol=1e-10)
    assert_allclose((1.0 - k1_weight("parzen", 1e-4)) / 1e-8, 6.0, rtol=1e-3)


def test_tukey_hanning_characteristics():
    ch = k1_characteristics("tukey-hanning")
    assert ch.q == 2
    assert_allclose(ch.k1q, np.pi**2 / 4.0, rtol=0)
    val, _ = integrate.quad(lambda t: k1_weight("tukey-hanning", t) ** 2, -1, 1)
    assert_allclose(val, 0.75, atol=1e-10)


def test_truncated_has_no_smoothness_constant():
    with pytest.raises(NoFiniteSmoothnessError):
        k1_characteristics("truncated")


def test_unknown_kernel_rejected():
    with pytest.raises(ValueError):
        k1_weight("gaussian", 0.5)
    with pytest.raises(ValueError):
        k2_weight("flat", 0.5)
