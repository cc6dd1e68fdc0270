"""Design-matrix breakdown diagnostics for the robust test.

A fixed design X and critical value C can doom the test before any data
arrive.  The failures are all driven by two directions: the constant vector
``e+ = (1, ..., 1)`` and the alternating vector ``e- = (-1, 1, -1, ...)``,
because scaling noise along either of them leaves the statistic unchanged.
Evaluating the statistic at ``mu0 + e+`` and ``mu0 + e-`` (mu0 any null
point) therefore decides limiting size and power:

- statistic defined and above C at either direction  -> size tends to 1;
- statistic defined and below C at either direction  -> power tends to 0;
- statistic exactly C at a direction where the statistic is differentiable
  -> size at least 1/2 in the limit;
- a direction inside span(X) whose restriction image R beta_hat(e) is
  nonzero -> size tends to 1 for every C (no critical value can help);
- statistic undefined almost everywhere -> the test never rejects at all
  (in particular whenever n < k(p+1) + p and q = k, a pure dimension trap).

``diagnose`` runs these checks in a fixed precedence and reports a verdict
with the evidence it rests on.  ``witness_design`` constructs, for any
feasible (n, k, p), a design and response at which the VAR fit is exactly
zero and the covariance estimate is positive definite — a certificate that
the dimension requirement is sharp.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bandwidth import RULE_NAMES, FixedBRule
from .model import (
    RegressionProblem,
    alternating_vector,
    constant_vector,
    null_point,
)
from .prewhiten import EstimatorConfig
from .testing import TestEngine, TestResult, _span_geometry

#: DiagnosticsReport.verdict values
SIZE_ONE = "SizeOne"
SIZE_ONE_SPAN_CASE = "SizeOneSpanCase"
SIZE_AT_LEAST_HALF = "SizeAtLeastHalf"
POWER_ZERO = "PowerZero"
TRIVIAL_BREAKDOWN = "TrivialBreakdown"
POSITIVE_UNADJUSTED = "PositiveUnadjusted"
INCONCLUSIVE = "Inconclusive"

#: tie detection: |t - C| <= TIE_RTOL * max(1, C)
TIE_RTOL = 1e-9
#: relative deviation between finite-difference gradients above which the
#: analytic differentiability claim is withdrawn
FD_AGREEMENT = 0.25


@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    """Verdict plus the boundary-direction evaluations it is based on.

    ``gradient_exists_*`` is True / None (None = statistic undefined there,
    or differentiability could not be certified); ``evidence`` holds the
    span geometry, probe counts, and per-direction classifications.
    """

    verdict: str
    critical_value: float
    t_plus: TestResult
    t_minus: TestResult
    gradient_exists_plus: bool | None
    gradient_exists_minus: bool | None
    evidence: dict


def _kernel_hits_kink(kernel, m_value: float, m: int) -> bool:
    """Does some lag ratio i / M land on a nondifferentiable point of kappa?"""
    for d in kernel.nondifferentiable_points:
        for i in range(1, m):
            if abs(i / m_value - d) <= 1e-9 * max(1.0, d):
                return True
    return False


def _fd_gradients_agree(engine: TestEngine, y: np.ndarray, steps) -> bool:
    """Central-difference gradients at several steps; True if they stabilize."""
    n = y.shape[0]
    grads = []
    for h in steps:
        g = np.empty(n)
        for j in range(n):
            bump = np.zeros(n)
            bump[j] = h
            t_up = engine.result(y + bump).t_value
            t_dn = engine.result(y - bump).t_value
            g[j] = (t_up - t_dn) / (2.0 * h)
        grads.append(g)
    scale = max(1.0, max(float(np.linalg.norm(g)) for g in grads))
    worst = max(
        float(np.linalg.norm(a - b)) for a, b in zip(grads[:-1], grads[1:])
    )
    return worst <= FD_AGREEMENT * scale


def _gradient_exists_at(
    engine: TestEngine,
    y: np.ndarray,
    result: TestResult,
    check_numerically: bool,
    steps,
) -> bool | None:
    rule = engine.config.rule
    if isinstance(rule, FixedBRule):
        # fixed-b bandwidths do not depend on y, so the statistic is a smooth
        # rational function wherever it is defined
        return True
    kernel = engine.config.kernel
    m_value = result.omega.m
    m = engine.problem.n - engine.config.p
    if m_value == 0.0:
        analytic = True if kernel.compact_support else None
    elif _kernel_hits_kink(kernel, m_value, m):
        analytic = None
    else:
        analytic = True
    if analytic is None or not check_numerically:
        return analytic
    # the numeric check can only withdraw the claim, never make one
    return True if _fd_gradients_agree(engine, y, steps) else None


def gradient_exists(
    problem: RegressionProblem,
    y,
    config: EstimatorConfig,
    *,
    check_numerically: bool = True,
    steps=(1e-4, 1e-5, 1e-6),
) -> bool | None:
    """Certify differentiability of the statistic at y (True) or give up (None).

    Analytic reasoning: fixed-b statistics are differentiable wherever
    defined; data-driven bandwidths are differentiable unless some lag ratio
    i / M sits on a nondifferentiable point of the kernel.  When requested,
    finite differences at several step sizes cross-check the analytic claim
    and withdraw it if the numeric gradients disagree.

    Raises ValueError when the statistic is undefined at y.
    """
    engine = TestEngine(problem, config)
    y = np.asarray(y, dtype=float)
    result = engine.result(y)
    if not result.defined:
        raise ValueError("gradient check requires the statistic to be defined at y")
    return _gradient_exists_at(engine, y, result, check_numerically, steps)


def _classify(result: TestResult, critical_value: float) -> str:
    if not result.defined:
        return "undefined"
    if abs(result.t_value - critical_value) <= TIE_RTOL * max(1.0, critical_value):
        return "tie"
    return "above" if result.t_value > critical_value else "below"


def diagnose(
    problem: RegressionProblem,
    config: EstimatorConfig,
    critical_value: float,
    *,
    probes: int = 1000,
    seed: int = 0,
) -> DiagnosticsReport:
    """Classify the limiting behaviour of the test at this design and C.

    Checks, in precedence order: trivial breakdown (statistic never found
    defined, at the boundary directions or on Gaussian probes), the span
    violation (a boundary direction inside span(X) with nonzero restriction
    image), size-one and tie certificates at the boundary directions, the
    power-zero certificate, and finally the benign case where both boundary
    directions lie harmlessly inside the span.
    """
    critical_value = float(critical_value)
    if not (np.isfinite(critical_value) and critical_value > 0):
        raise ValueError(f"critical value must be finite and > 0, got {critical_value}")
    engine = TestEngine(problem, config)
    n, k, q, p = problem.n, problem.k, problem.q, config.p
    mu0 = null_point(problem).mu0
    e_plus = constant_vector(n)
    e_minus = alternating_vector(n)
    res_plus = engine.result(mu0 + e_plus, critical_value)
    res_minus = engine.result(mu0 + e_minus, critical_value)

    plus_in, image_plus, plus_zero = _span_geometry(problem, e_plus)
    minus_in, image_minus, minus_zero = _span_geometry(problem, e_minus)

    nontrivial = res_plus.defined or res_minus.defined
    probes_used = 0
    if not nontrivial:
        rng = np.random.default_rng(seed)
        while probes_used < probes:
            probes_used += 1
            if engine.result(mu0 + rng.standard_normal(n)).defined:
                nontrivial = True
                break
    dimension_trap = n < k * (p + 1) + p and q == k

    kind_plus = _classify(res_plus, critical_value)
    kind_minus = _classify(res_minus, critical_value)

    grad_plus = grad_minus = None
    if res_plus.defined:
        grad_plus = _gradient_exists_at(
            engine, mu0 + e_plus, res_plus, kind_plus == "tie", (1e-4, 1e-5, 1e-6)
        )
    if res_minus.defined:
        grad_minus = _gradient_exists_at(
            engine, mu0 + e_minus, res_minus, kind_minus == "tie", (1e-4, 1e-5, 1e-6)
        )

    evidence = {
        "plus_in_span": plus_in,
        "minus_in_span": minus_in,
        "image_plus": [float(v) for v in image_plus],
        "image_minus": [float(v) for v in image_minus],
        "kind_plus": kind_plus,
        "kind_minus": kind_minus,
        "nontrivial": nontrivial,
        "probes_used": probes_used,
        "dimension_trap": dimension_trap,
        "tie_tolerance": TIE_RTOL * max(1.0, critical_value),
    }

    if not nontrivial:
        verdict = TRIVIAL_BREAKDOWN
    elif (plus_in and not plus_zero) or (minus_in and not minus_zero):
        verdict = SIZE_ONE_SPAN_CASE
    elif plus_in and minus_in:
        verdict = POSITIVE_UNADJUSTED
    elif kind_plus == "above" or kind_minus == "above":
        verdict = SIZE_ONE
    elif (kind_plus == "tie" and grad_plus is True) or (
        kind_minus == "tie" and grad_minus is True
    ):
        verdict = SIZE_AT_LEAST_HALF
    elif kind_plus == "below" or kind_minus == "below":
        verdict = POWER_ZERO
    else:
        verdict = INCONCLUSIVE

    return DiagnosticsReport(
        verdict=verdict,
        critical_value=critical_value,
        t_plus=res_plus,
        t_minus=res_minus,
        gradient_exists_plus=grad_plus,
        gradient_exists_minus=grad_minus,
        evidence=evidence,
    )


def witness_design(n: int, k: int, p: int, rule_kind: str = "fixed-b"):
    """A design and response at which the prewhitened estimate is exactly PD.

    Returns ``(y, X)`` with integer-valued entries arranged so that, in exact
    float arithmetic: the OLS residual of y is the constant vector, every
    VAR coefficient block is exactly zero, the data-driven bandwidths are
    exactly zero, and the covariance estimate is positive definite for all
    three bandwidth rules (with unit score weights).

    Requires ``n >= k(p+1) + p`` — plus one more observation for the
    autoregressive plug-in rule, whose per-row variances need one extra
    residual column.  The bound is sharp: below it no design at all avoids a
    rank-deficient VAR fit when every coefficient is restricted.
    """
    if rule_kind not in RULE_NAMES:
        raise ValueError(f"rule_kind must be one of {RULE_NAMES}, got {rule_kind!r}")
    n, k, p = int(n), int(k), int(p)
    if k < 1 or p < 1:
        raise ValueError(f"need k >= 1 and p >= 1, got k = {k}, p = {p}")
    need = k * (p + 1) + p + (1 if rule_kind == "andrews" else 0)
    if n < need:
        raise ValueError(
            f"witness design needs n >= {need} for k = {k}, p = {p}, "
            f"rule {rule_kind!r}; got n = {n}"
        )
    # Unit lower-bidiagonal differences: every column of H sums to zero
    # exactly (so X' e+ = 0 in floats), any k rows of H are unimodular, and
    # spacing the rows p+1 apart makes all VAR cross-products exactly zero.
    g = np.eye(k) - np.eye(k, k=-1)
    h = np.vstack([-g.sum(axis=0), g])
    X = np.zeros((n, k))
    X[np.arange(k + 1) * (p + 1), :] = h
    return np.ones(n), X
