"""Autocorrelation-robust F-type tests of linear restrictions.

The pieces: ``model`` describes the regression problem and the Gaussian
covariance families, ``kernels`` and ``bandwidth`` the smoothing choices,
``prewhiten`` the VAR-prewhitened covariance estimator with its typed
undefinedness outcomes, ``testing`` the statistic and the
artificial-regressor adjustment, ``diagnostics`` the design breakdown
verdicts, and ``montecarlo`` critical-value calibration and size/power
studies.
"""
from .bandwidth import (
    OMEGA_PRESETS,
    RULE_NAMES,
    AndrewsRule,
    BandwidthOutcome,
    FixedBRule,
    NeweyWestRule,
    bandwidth_am,
    bandwidth_kv,
    bandwidth_nw,
    compute_bandwidth,
    default_rule,
    rectangular_cutoff,
    resolve_omega,
)
from .diagnostics import (
    INCONCLUSIVE,
    POSITIVE_UNADJUSTED,
    POWER_ZERO,
    SIZE_AT_LEAST_HALF,
    SIZE_ONE,
    SIZE_ONE_SPAN_CASE,
    TRIVIAL_BREAKDOWN,
    DiagnosticsReport,
    diagnose,
    gradient_exists,
    witness_design,
)
from .kernels import (
    BARTLETT,
    PARZEN,
    QUADRATIC_SPECTRAL,
    KernelSpec,
    get_kernel,
    kernel_eval,
    kernel_names,
    register_kernel,
    toeplitz_weights,
)
from .model import (
    AR1Grid,
    AR1Restricted,
    ExplicitList,
    NullPoint,
    RegressionProblem,
    alternating_vector,
    ar1_matrix,
    constant_vector,
    ma_closure_matrix,
    null_point,
    sample_gaussian_ar1,
)
from .montecarlo import (
    DEFAULT_RHO_GRID,
    CalibrationNotApplicableError,
    CalibrationResult,
    CurvePoint,
    McConfig,
    SizePowerCurve,
    SizeReport,
    calibrate_critical_value,
    empirical_size,
    power_curve,
    rejection_probability,
    simulate_statistics,
)
from .prewhiten import (
    BANDWIDTH_UNDEFINED,
    POSITIVE_DEFINITE,
    RECOLOR_SINGULAR,
    SINGULAR_NONNEG,
    VAR_RANK_DEFICIENT,
    ZERO,
    EstimatorConfig,
    OmegaEngine,
    OmegaOutcome,
    PrewhitenFit,
    assemble_omega,
    classify_definiteness,
    compute_gamma,
    fit_var_ols,
)
from .testing import (
    REASON_ADJUSTMENT_UNNECESSARY,
    REASON_HYPOTHESIS_INVOLVES_INTERCEPT,
    AdjustedProblem,
    AdjustmentNotApplicableError,
    AugmentationImpossibleError,
    ScenarioSelection,
    TestEngine,
    TestResult,
    adjusted_statistic,
    build_adjusted,
    select_scenario,
    test_statistic,
)

__version__ = "0.1.0"

__all__ = [
    "AR1Grid",
    "AR1Restricted",
    "AdjustedProblem",
    "AdjustmentNotApplicableError",
    "AndrewsRule",
    "AugmentationImpossibleError",
    "BANDWIDTH_UNDEFINED",
    "BARTLETT",
    "BandwidthOutcome",
    "CalibrationNotApplicableError",
    "CalibrationResult",
    "CurvePoint",
    "DEFAULT_RHO_GRID",
    "DiagnosticsReport",
    "EstimatorConfig",
    "ExplicitList",
    "FixedBRule",
    "INCONCLUSIVE",
    "KernelSpec",
    "McConfig",
    "NeweyWestRule",
    "NullPoint",
    "OMEGA_PRESETS",
    "OmegaEngine",
    "OmegaOutcome",
    "PARZEN",
    "POSITIVE_DEFINITE",
    "POSITIVE_UNADJUSTED",
    "POWER_ZERO",
    "PrewhitenFit",
    "QUADRATIC_SPECTRAL",
    "REASON_ADJUSTMENT_UNNECESSARY",
    "REASON_HYPOTHESIS_INVOLVES_INTERCEPT",
    "RECOLOR_SINGULAR",
    "RULE_NAMES",
    "RegressionProblem",
    "SINGULAR_NONNEG",
    "SIZE_AT_LEAST_HALF",
    "SIZE_ONE",
    "SIZE_ONE_SPAN_CASE",
    "ScenarioSelection",
    "SizePowerCurve",
    "SizeReport",
    "TRIVIAL_BREAKDOWN",
    "TestEngine",
    "TestResult",
    "VAR_RANK_DEFICIENT",
    "ZERO",
    "adjusted_statistic",
    "alternating_vector",
    "ar1_matrix",
    "assemble_omega",
    "bandwidth_am",
    "bandwidth_kv",
    "bandwidth_nw",
    "build_adjusted",
    "calibrate_critical_value",
    "classify_definiteness",
    "compute_bandwidth",
    "compute_gamma",
    "constant_vector",
    "default_rule",
    "diagnose",
    "empirical_size",
    "fit_var_ols",
    "get_kernel",
    "gradient_exists",
    "kernel_eval",
    "kernel_names",
    "ma_closure_matrix",
    "null_point",
    "power_curve",
    "rectangular_cutoff",
    "register_kernel",
    "rejection_probability",
    "resolve_omega",
    "sample_gaussian_ar1",
    "select_scenario",
    "simulate_statistics",
    "test_statistic",
    "toeplitz_weights",
    "witness_design",
]
