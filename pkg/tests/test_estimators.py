import numpy as np
import pytest
from numpy.testing import assert_allclose
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from dkhac.dgp import SlsAr1Spec, sls_ar1_path
from dkhac.estimators import (
    EWC,
    DoubleKernelHAC,
    KernelHAC,
    classical_hac,
    dk_hac,
    ewc,
    ewc_default_terms,
    psd_project,
)
from dkhac.exceptions import ConfigurationError
from dkhac.kernels import k1_weight
from dkhac.local_cov import SmoothingPlan, local_autocov, n_blocks


def brute_dk_hac(V, plan, lag_kernel="qs"):
    """Definition-order double sum: r inner, signed k outer, reversed."""
    T, p = V.shape
    n = plan.block_length
    J = np.zeros((p, p))
    for k in range(T - 1, -T, -1):
        w = float(k1_weight(lag_kernel, plan.b1 * k))
        if w == 0.0:
            continue
        gam = np.zeros((p, p))
        for r in range(n_blocks(T, n) - 1, -1, -1):
            gam += local_autocov(V, r, k, plan.b2, n)
        J += w * gam * (n / (T - n))
    if plan.dof_adjust:
        J *= T / (T - p)
    return 0.5 * (J + J.T)


def test_dk_hac_zero_scores():
    plan = SmoothingPlan(b1=0.2, b2=0.5, block_length=8)
    est = dk_hac(np.zeros((40, 2)), plan)
    assert np.all(est.J == 0.0)
    assert not est.psd_repaired


def test_dk_hac_matches_definition_and_summation_order():
    rng = np.random.default_rng(2)
    V = rng.standard_normal((40, 2))
    plan = SmoothingPlan(b1=0.15, b2=0.45, block_length=8)
    want = brute_dk_hac(V, plan)
    got = dk_hac(V, plan).J
    assert_allclose(got, want, rtol=1e-12, atol=1e-14)


def test_dk_hac_scale_equivariance():
    rng = np.random.default_rng(4)
    V = rng.standard_normal((60, 2))
    plan = SmoothingPlan(b1=0.2, b2=0.5, block_length=12)
    base = dk_hac(V, plan).J
    for c in (2.0, 10.0):
        assert_allclose(dk_hac(c * V, plan).J, c**2 * base, rtol=1e-10)


def test_dk_hac_symmetric_output():
    rng = np.random.default_rng(8)
    V = rng.standard_normal((80, 3))
    est = dk_hac(V, SmoothingPlan(b1=0.2, b2=0.4, block_length=16))
    assert np.array_equal(est.J, est.J.T)


@pytest.mark.slow
def test_dk_hac_ar1_long_run_variance():
    # AR(1) a=0.4, innovation variance 0.5: J = 0.5 / (1 - 0.4)^2.
    # Bandwidths at the optimal T^(-1/6) scale, with the time window kept
    # short so it stays inside the sample (the series is stationary).
    from dkhac.bandwidths import default_block_length

    truth = 0.5 / 0.36
    T = 2000
    plan = SmoothingPlan(b1=0.10, b2=0.15, block_length=default_block_length(T))
    spec = SlsAr1Spec(rho=lambda u: 0.4, sigma=lambda u: np.sqrt(0.5))
    vals = []
    for seed in range(500):
        v = sls_ar1_path(spec, T, seed)[:, None]
        vals.append(dk_hac(v, plan).J[0, 0])
    assert abs(np.mean(vals) - truth) < 0.12


def test_classical_hac_zero_scores():
    assert np.all(classical_hac(np.zeros((30, 2)), 0.3).J == 0.0)


def test_classical_hac_equals_newey_west_loop():
    # Bartlett with b1 = 1/(m+1) is the textbook Newey-West estimator
    rng = np.random.default_rng(10)
    T, p, m = 50, 2, 6
    V = rng.standard_normal((T, p))
    est = classical_hac(V, 1.0 / (m + 1), "bartlett", dof_adjust=False)
    want = V.T @ V / T
    for j in range(1, m + 1):
        w = 1.0 - j / (m + 1.0)
        G = V[j:].T @ V[:-j] / T
        want += w * (G + G.T)
    assert_allclose(est.J, 0.5 * (want + want.T), atol=1e-12)


def test_classical_hac_truncated_single_term():
    # truncated kernel with b1 > 1 keeps only the zero lag
    rng = np.random.default_rng(12)
    V = rng.standard_normal((40, 2))
    est = classical_hac(V, 1.5, "truncated")
    want = (40 / 38) * V.T @ V / 40
    assert_allclose(est.J, 0.5 * (want + want.T), atol=1e-13)


def test_classical_bartlett_always_psd():
    rng = np.random.default_rng(14)
    for _ in range(100):
        V = rng.standard_normal((60, 3))
        b1 = float(rng.uniform(0.05, 1.0))
        est = classical_hac(V, b1, "bartlett")
        assert est.min_eig >= -1e-10 * max(1.0, np.trace(est.J))


def test_ewc_zero_scores():
    est = ewc(np.zeros((30, 1)), 5)
    assert np.all(est.J == 0.0)
    assert est.df == 5


def test_ewc_cosine_orthogonality():
    # scores equal to the first cosine basis function: with B=1, J = T/2
    T = 16
    t = np.arange(1, T + 1) - 0.5
    V = np.cos(np.pi * t / T)[:, None]
    est = ewc(V, 1)
    assert_allclose(est.J[0, 0], T / 2.0, rtol=1e-12)


def test_ewc_default_rule_and_calibration():
    assert ewc_default_terms(200) == 13
    assert ewc_default_terms(800) == 34
    vals = []
    T = 2000
    B = ewc_default_terms(T)
    for seed in range(200):
        V = np.random.default_rng(seed).standard_normal((T, 1))
        vals.append(ewc(V, B).J[0, 0])
    assert 0.9 < np.mean(vals) < 1.1


def test_ewc_psd_by_construction():
    rng = np.random.default_rng(16)
    for _ in range(50):
        V = rng.standard_normal((64, 3))
        assert ewc(V, 9).min_eig >= -1e-12


def test_ewc_bad_terms():
    with pytest.raises(ConfigurationError):
        ewc(np.zeros((10, 1)), 0)
    with pytest.raises(ConfigurationError):
        ewc(np.zeros((10, 1)), 10)


def test_psd_project_identity_untouched():
    est = classical_hac(np.eye(8)[:, :2], 0.5, "bartlett")
    base = psd_project(est, floor=0.0)
    assert base is est or np.array_equal(base.J, est.J)
    assert not base.psd_repaired


def test_psd_project_clips_negative_eigenvalue():
    from dkhac.estimators import LrvEstimate

    est = LrvEstimate(J=np.diag([1.0, -0.1]), kind="test", min_eig=-0.1)
    fixed = psd_project(est, floor=0.0)
    assert fixed.psd_repaired
    assert_allclose(fixed.J, np.diag([1.0, 0.0]), atol=1e-15)
    assert_allclose(fixed.min_eig, -0.1)


def test_psd_project_keeps_psd_matrix():
    from dkhac.estimators import LrvEstimate

    rng = np.random.default_rng(18)
    A = rng.standard_normal((3, 3))
    J = A @ A.T
    est = LrvEstimate(J=J, kind="test", min_eig=float(np.linalg.eigvalsh(J).min()))
    fixed = psd_project(est, floor=0.0)
    assert_allclose(fixed.J, J, atol=1e-12)
    assert not fixed.psd_repaired


def test_estimator_classes_sklearn_surface():
    rng = np.random.default_rng(20)
    V = rng.standard_normal((200, 2))
    for est in (DoubleKernelHAC(), KernelHAC(), EWC()):
        with pytest.raises(NotFittedError):
            est._check_fitted()
        params = est.get_params()
        assert isinstance(params, dict)
        cloned = clone(est)
        cloned.fit(V)
        assert cloned.covariance_.shape == (2, 2)
        assert np.array_equal(cloned.covariance_, cloned.covariance_.T)


def test_double_kernel_class_fixed_and_plugin():
    rng = np.random.default_rng(22)
    V = rng.standard_normal((150, 1))
    fixed = DoubleKernelHAC(bandwidth=(0.2, 0.5)).fit(V)
    assert fixed.b1_ == 0.2 and fixed.b2_ == 0.5
    assert fixed.plugin_ is None
    auto = DoubleKernelHAC().fit(V)
    assert 0.0 < auto.b1_ <= 1.0 and 0.0 < auto.b2_ <= 1.0
    assert auto.plugin_ is not None


def test_kernel_hac_class_bandwidth_rules():
    rng = np.random.default_rng(24)
    V = rng.standard_normal((150, 2))
    nw = KernelHAC(kernel="bartlett", bandwidth="newey-west").fit(V)
    assert 0.0 < nw.b1_ <= 1.0
    qs = KernelHAC(kernel="qs", bandwidth="andrews").fit(V)
    assert 0.0 < qs.b1_ <= 1.0
    with pytest.raises(ConfigurationError):
        KernelHAC(kernel="qs", bandwidth="newey-west").fit(V)
