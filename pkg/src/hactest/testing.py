"""The robust F-type statistic and the artificial-regressor adjustment.

The statistic for H0: R beta = r is the Wald-type quadratic form

    T(y) = (R beta_hat - r)' Omega_hat^{-1} (R beta_hat - r)

whenever the covariance estimate is defined and positive definite, and
T(y) = 0 otherwise — the test never rejects where its variance estimate
breaks down, which is exactly what makes the breakdown directions
(the constant and the alternating vector) diagnosable.

The adjustment appends one or both of those directions as artificial
regressors so that neither remains in a problematic position relative to
the column span, padding the restriction matrix (and any score weights)
with zeros so the hypothesis — and, under the null, the fitted statistic's
distribution target — is unchanged.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ._linalg import EPS, numeric_rank
from .bandwidth import FixedBRule, resolve_omega
from .model import RegressionProblem, alternating_vector, constant_vector
from .prewhiten import (
    POSITIVE_DEFINITE,
    EstimatorConfig,
    OmegaEngine,
    OmegaOutcome,
    classify_definiteness,
)

#: reasons the adjustment does not apply (ScenarioSelection.reason)
REASON_ADJUSTMENT_UNNECESSARY = "adjustment-unnecessary"
REASON_HYPOTHESIS_INVOLVES_INTERCEPT = "hypothesis-involves-intercept"

#: span-membership tolerance: ||e - proj(e)|| <= MEMBERSHIP_RTOL * sqrt(n)
MEMBERSHIP_RTOL = 1e-8
#: zero test for the restriction image R beta_hat(e)
IMAGE_RTOL = 1e-8


class AdjustmentNotApplicableError(ValueError):
    """The adjustment has nothing to fix, or cannot fix this hypothesis."""


class AugmentationImpossibleError(ValueError):
    """The augmented design would need at least as many columns as rows."""


@dataclass(frozen=True, eq=False)
class TestResult:
    """Statistic value plus everything needed to interpret it.

    ``defined`` is False when the covariance estimate is undefined or not
    positive definite; the statistic is 0 by convention in that case.
    ``reject`` is None unless a critical value was supplied.
    """

    t_value: float
    defined: bool
    reject: bool | None
    critical_value: float | None
    omega: OmegaOutcome
    scenario: int | None = None


@dataclass(frozen=True, eq=False)
class ScenarioSelection:
    """Where the two breakdown directions sit relative to span(X).

    ``scenario`` is 1-4 when an augmentation applies and None otherwise, in
    which case ``reason`` says why.  The membership flags and restriction
    images record the geometry the decision was based on.
    """

    scenario: int | None
    reason: str | None
    kbar: int | None
    plus_in_span: bool
    minus_in_span: bool
    image_plus: np.ndarray
    image_minus: np.ndarray

    @property
    def applicable(self) -> bool:
        return self.scenario is not None


@dataclass(frozen=True, eq=False)
class AdjustedProblem:
    """Augmented problem, padded restrictions, and the matching config."""

    scenario: int
    problem: RegressionProblem
    config: EstimatorConfig
    original: RegressionProblem
    original_config: EstimatorConfig

    @property
    def kbar(self) -> int:
        return self.problem.k


class TestEngine:
    """Evaluates the statistic repeatedly for one (problem, config)."""

    def __init__(self, problem: RegressionProblem, config: EstimatorConfig):
        self.problem = problem
        self.config = config
        self.omega_engine = OmegaEngine(problem, config)

    def result(
        self,
        y,
        critical_value: float | None = None,
        scenario: int | None = None,
    ) -> TestResult:
        y = np.asarray(y, dtype=float)
        out = self.omega_engine.outcome(y)
        t = 0.0
        defined = False
        if out.well_defined and classify_definiteness(out) == POSITIVE_DEFINITE:
            d = self.problem.R @ self.omega_engine.beta_hat(y) - self.problem.r
            t = _quadratic_form(out.omega, d)
            defined = True
        reject = None if critical_value is None else bool(t >= critical_value)
        return TestResult(
            t_value=t,
            defined=defined,
            reject=reject,
            critical_value=critical_value,
            omega=out,
            scenario=scenario,
        )


def _quadratic_form(omega: np.ndarray, d: np.ndarray) -> float:
    """d' omega^{-1} d for positive definite omega, guaranteed >= 0."""
    try:
        L = np.linalg.cholesky(omega)
        w = np.linalg.solve(L, d)
        return float(w @ w)
    except np.linalg.LinAlgError:
        # rank-classified PD but too ill-conditioned for Cholesky: invert on
        # the numerically significant eigenspace only
        vals, vecs = np.linalg.eigh(omega)
        tol = max(vals[-1], 0.0) * omega.shape[0] * EPS
        keep = vals > tol
        if not np.any(keep):
            return 0.0
        proj = vecs.T @ d
        return float(np.sum(proj[keep] ** 2 / vals[keep]))


def test_statistic(
    problem: RegressionProblem,
    y,
    config: EstimatorConfig,
    critical_value: float | None = None,
) -> TestResult:
    """Evaluate the statistic once; use TestEngine for repeated evaluation."""
    return TestEngine(problem, config).result(y, critical_value)


def _span_geometry(problem: RegressionProblem, e: np.ndarray):
    """Membership of e in span(X) and its restriction image R beta_hat(e)."""
    X = problem.X
    coef, *_ = np.linalg.lstsq(X, e, rcond=None)
    resid = e - X @ coef
    in_span = bool(
        float(np.linalg.norm(resid)) <= MEMBERSHIP_RTOL * float(np.sqrt(problem.n))
    )
    image = problem.R @ coef
    scale = max(1.0, float(np.linalg.norm(problem.R, ord=2)) * float(np.linalg.norm(coef)))
    image_zero = bool(float(np.linalg.norm(image)) <= IMAGE_RTOL * scale)
    return in_span, image, image_zero


def select_scenario(problem: RegressionProblem) -> ScenarioSelection:
    """Decide which augmentation (if any) the design calls for.

    Scenarios: (1) the constant lies in span(X) with zero restriction image
    and the alternating vector does not — append the alternating vector;
    (2) the mirror case — append the constant; (3) neither lies in the span
    and appending both keeps full column rank — append both; (4) neither lies
    in the span but the two directions are collinear modulo the span — append
    the constant only.

    Raises AugmentationImpossibleError when the augmented design could not
    have full column rank for this n.
    """
    n, k = problem.n, problem.k
    e_plus = constant_vector(n)
    e_minus = alternating_vector(n)
    plus_in, image_plus, plus_zero = _span_geometry(problem, e_plus)
    minus_in, image_minus, minus_zero = _span_geometry(problem, e_minus)

    if (plus_in and not plus_zero) or (minus_in and not minus_zero):
        return ScenarioSelection(
            scenario=None,
            reason=REASON_HYPOTHESIS_INVOLVES_INTERCEPT,
            kbar=None,
            plus_in_span=plus_in,
            minus_in_span=minus_in,
            image_plus=image_plus,
            image_minus=image_minus,
        )
    if plus_in and minus_in:
        return ScenarioSelection(
            scenario=None,
            reason=REASON_ADJUSTMENT_UNNECESSARY,
            kbar=None,
            plus_in_span=plus_in,
            minus_in_span=minus_in,
            image_plus=image_plus,
            image_minus=image_minus,
        )
    if plus_in:
        scenario = 1
    elif minus_in:
        scenario = 2
    else:
        stacked = np.column_stack([problem.X, e_plus, e_minus])
        scenario = 3 if numeric_rank(stacked) == k + 2 else 4
    kbar = k + (2 if scenario == 3 else 1)
    if kbar >= n:
        raise AugmentationImpossibleError(
            f"augmented design would have kbar = {kbar} columns with only "
            f"n = {n} observations"
        )
    return ScenarioSelection(
        scenario=scenario,
        reason=None,
        kbar=kbar,
        plus_in_span=plus_in,
        minus_in_span=minus_in,
        image_plus=image_plus,
        image_minus=image_minus,
    )


def _padded_rule(rule, k: int, extra: int):
    """Zero-pad score weights to the augmented width; fixed-b needs nothing."""
    if isinstance(rule, FixedBRule):
        return rule
    weights = resolve_omega(rule.omega, k)
    padded = tuple(float(w) for w in weights) + (0.0,) * extra
    return dataclasses.replace(rule, omega=padded)


def build_adjusted(problem: RegressionProblem, config: EstimatorConfig) -> AdjustedProblem:
    """Construct the augmented problem for whichever scenario applies.

    Raises AdjustmentNotApplicableError when no scenario applies, and
    ValueError when the VAR order is too large for the augmented width
    (the adjusted test needs p <= n/(k+3)).
    """
    selection = select_scenario(problem)
    if not selection.applicable:
        raise AdjustmentNotApplicableError(
            f"adjustment not applicable: {selection.reason}"
        )
    n, k, q = problem.n, problem.k, problem.q
    if config.p * (k + 3) > n:
        raise ValueError(
            f"p must satisfy 1 <= p <= n/(k+3) for the adjusted test; got "
            f"p = {config.p} with n = {n}, k = {k}"
        )
    e_plus = constant_vector(n)
    e_minus = alternating_vector(n)
    if selection.scenario == 1:
        extra_cols = [e_minus]
    elif selection.scenario == 2:
        extra_cols = [e_plus]
    elif selection.scenario == 3:
        extra_cols = [e_plus, e_minus]
    else:
        extra_cols = [e_plus]
    extra = len(extra_cols)
    x_bar = np.column_stack([problem.X] + extra_cols)
    r_bar = np.hstack([problem.R, np.zeros((q, extra))])
    adjusted_problem = RegressionProblem(x_bar, r_bar, problem.r)
    adjusted_config = dataclasses.replace(
        config, rule=_padded_rule(config.rule, k, extra)
    )
    return AdjustedProblem(
        scenario=selection.scenario,
        problem=adjusted_problem,
        config=adjusted_config,
        original=problem,
        original_config=config,
    )


def adjusted_statistic(
    adjusted: AdjustedProblem,
    y,
    critical_value: float | None = None,
) -> TestResult:
    """Evaluate the adjusted statistic T-bar at one response vector."""
    engine = TestEngine(adjusted.problem, adjusted.config)
    return engine.result(y, critical_value, scenario=adjusted.scenario)
