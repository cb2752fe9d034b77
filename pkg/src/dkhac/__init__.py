"""Long-run variance estimation robust to nonstationarity.

Double-kernel HAC estimation with jointly MSE-optimal data-dependent
bandwidths, classical kernel HAC and cosine-projection comparators, HAR
test statistics with simulated fixed-b critical values, simulators for
the reference Monte Carlo designs, and an experiment harness with a CLI
(``lrv``).
"""

from .bandwidths import (
    BandwidthPair,
    PluginQuantities,
    andrews_alpha,
    andrews_bandwidth,
    asymptotic_remse,
    joint_plugin_bandwidths,
    newey_west_bandwidth,
    remse_optimal_pair,
)
from .dgp import DgpSpec, SlsAr1Spec, simulate, sls_ar1_path
from .estimators import (
    EWC,
    DoubleKernelHAC,
    KernelHAC,
    LrvEstimate,
    classical_hac,
    dk_hac,
    ewc,
    psd_project,
)
from .exceptions import (
    ConfigurationError,
    DegenerateDataWarning,
    NoFiniteSmoothnessError,
    NumericError,
)
from .har import (
    GrInputs,
    RegressionFit,
    critical_value,
    fixed_b_critical_value,
    gr_inputs,
    gr_scores,
    gr_statistic,
    ols_fit,
    t_statistic,
)
from .harness import ExperimentConfig, ExperimentResult, emit_table, run_experiment
from .kernels import K1Characteristics, k1_characteristics, k1_weight, k2_weight
from .local_cov import (
    SmoothingPlan,
    block_avg_autocov,
    classical_autocov,
    local_autocov,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthPair",
    "PluginQuantities",
    "andrews_alpha",
    "andrews_bandwidth",
    "asymptotic_remse",
    "joint_plugin_bandwidths",
    "newey_west_bandwidth",
    "remse_optimal_pair",
    "DgpSpec",
    "SlsAr1Spec",
    "simulate",
    "sls_ar1_path",
    "EWC",
    "DoubleKernelHAC",
    "KernelHAC",
    "LrvEstimate",
    "classical_hac",
    "dk_hac",
    "ewc",
    "psd_project",
    "ConfigurationError",
    "DegenerateDataWarning",
    "NoFiniteSmoothnessError",
    "NumericError",
    "GrInputs",
    "RegressionFit",
    "critical_value",
    "fixed_b_critical_value",
    "gr_inputs",
    "gr_scores",
    "gr_statistic",
    "ols_fit",
    "t_statistic",
    "ExperimentConfig",
    "ExperimentResult",
    "emit_table",
    "run_experiment",
    "K1Characteristics",
    "k1_characteristics",
    "k1_weight",
    "k2_weight",
    "SmoothingPlan",
    "block_avg_autocov",
    "classical_autocov",
    "local_autocov",
]
