"""Monte Carlo critical values, size, and power for the robust test.

Null rejection rates are driven by a covariance family (AR(1) grids by
default, explicit matrices if preferred); the worst-case rate over the
family is the empirical size.  Calibration finds the smallest critical
value whose empirical size stays below the target level, reusing one
simulated statistic array per family member (common random numbers), which
makes the empirical size exactly nonincreasing in C and the search a clean
bisection.

Replication ``idx`` of a run seeded ``s`` always draws from
``default_rng(SeedSequence((s, idx)))``: rates are bitwise reproducible and
independent of any chunked execution order, and two runs with the same seed
share innovations across family members.

Calibrating the *unadjusted* test is refused (CalibrationNotApplicableError)
unless both boundary directions lie harmlessly inside the regression span:
anywhere else, some arbitrarily-persistent family member pushes the true
size to one, so no simulated critical value means what it claims.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import (
    AR1Grid,
    AR1Restricted,
    CovarianceFamily,
    ExplicitList,
    RegressionProblem,
    _ar1_path,
    null_point,
)
from .prewhiten import EstimatorConfig
from .testing import (
    REASON_ADJUSTMENT_UNNECESSARY,
    AdjustedProblem,
    AugmentationImpossibleError,
    TestEngine,
    select_scenario,
)

#: default AR(1) size grid: dense near the unit root, where size escapes first
DEFAULT_RHO_GRID = (
    -0.9999, -0.99, -0.95, -0.9, -0.6, -0.3, 0.0,
    0.3, 0.6, 0.9, 0.95, 0.99, 0.9999,
)

#: reported probabilities need at least this many replications
MIN_REPORTED_REPS = 100


class CalibrationNotApplicableError(ValueError):
    """No critical value can control the size of this (unadjusted) test."""


@dataclass(frozen=True)
class McConfig:
    """Replication count, seeding, and the covariance family of a study."""

    replications: int
    seed: int = 0
    family: CovarianceFamily = field(default_factory=lambda: AR1Grid(DEFAULT_RHO_GRID))
    sigma: float = 1.0
    parallel_chunks: int = 1
    beta_alternatives: tuple = ()

    def __post_init__(self):
        if not (isinstance(self.replications, (int, np.integer)) and self.replications >= 1):
            raise ValueError(f"replications must be an integer >= 1, got {self.replications}")
        if not (isinstance(self.seed, (int, np.integer)) and self.seed >= 0):
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not (isinstance(self.parallel_chunks, (int, np.integer)) and self.parallel_chunks >= 1):
            raise ValueError(f"parallel_chunks must be an integer >= 1, got {self.parallel_chunks}")
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "parallel_chunks", int(self.parallel_chunks))
        object.__setattr__(self, "beta_alternatives", tuple(self.beta_alternatives))


@dataclass(frozen=True)
class CurvePoint:
    """One (family member, alternative distance) rejection rate."""

    label: str
    rho: float | None
    distance: float
    rate: float
    ci: float


@dataclass(frozen=True)
class SizePowerCurve:
    points: tuple

    @property
    def max_rate(self) -> float:
        return max(p.rate for p in self.points)

    def to_csv(self, header: bool = False) -> str:
        lines = ["rho,distance,rate,ci"] if header else []
        for p in self.points:
            lines.append(f"{p.label},{p.distance:g},{p.rate:.10g},{p.ci:.10g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> list:
        return [
            {"rho": p.label, "distance": p.distance, "rate": p.rate, "ci": p.ci}
            for p in self.points
        ]


@dataclass(frozen=True)
class SizeReport:
    """Worst-case null rejection rate over the family, with the full curve."""

    max_rate: float
    argmax_label: str
    curve: SizePowerCurve


@dataclass(frozen=True, eq=False)
class CalibrationResult:
    """Calibrated critical value and the sizes backing it up."""

    critical_value: float
    size: float
    rates: dict
    c_hi: float
    delta: float
    tol: float


def _family_members(family: CovarianceFamily):
    """Yield (label, rho-or-None, sampler-spec) per family member.

    The sampler spec is a float rho for AR(1) members and a covariance
    matrix for explicit ones.
    """
    if isinstance(family, (AR1Grid, AR1Restricted)):
        return [(f"{rho:g}", float(rho), float(rho)) for rho in family.rhos]
    if isinstance(family, ExplicitList):
        return [
            (f"matrix{i}", None, mat) for i, mat in enumerate(family.matrices)
        ]
    raise ValueError(f"unsupported covariance family: {type(family).__name__}")


def _make_sampler(cov, n: int):
    """Turn a rho or covariance matrix into a draw of u ~ N(0, Sigma)."""
    if isinstance(cov, (int, float, np.floating, np.integer)):
        rho = float(cov)
        if not abs(rho) < 1:
            raise ValueError(f"AR(1) parameter must satisfy |rho| < 1, got {rho}")
        return lambda rng: _ar1_path(rho, rng.standard_normal(n))
    mat = np.asarray(cov, dtype=float)
    if mat.shape != (n, n):
        raise ValueError(f"covariance matrix must be {n} x {n}, got {mat.shape}")
    try:
        chol = np.linalg.cholesky(mat)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix is not positive definite") from exc
    return lambda rng: chol @ rng.standard_normal(n)


def _resolve_target(target, est_config: EstimatorConfig | None):
    """An engine to evaluate plus the problem whose model generates the data.

    For an AdjustedProblem the adjusted statistic is evaluated but the data
    come from the original design — the artificial regressors never enter
    the data-generating process.
    """
    if isinstance(target, AdjustedProblem):
        return TestEngine(target.problem, target.config), target.original
    if isinstance(target, RegressionProblem):
        if est_config is None:
            raise ValueError("est_config is required when the target is a bare problem")
        return TestEngine(target, est_config), target
    raise ValueError(f"target must be a RegressionProblem or AdjustedProblem, got {type(target).__name__}")


def simulate_statistics(
    target,
    *,
    cov,
    beta,
    reps: int,
    seed: int,
    sigma: float = 1.0,
    est_config: EstimatorConfig | None = None,
) -> np.ndarray:
    """Statistic values over ``reps`` draws of y = X beta + sigma * u.

    ``cov`` is an AR(1) rho or an explicit covariance matrix.  Replication
    idx draws from ``default_rng(SeedSequence((seed, idx)))``, so equal seeds
    give bitwise-equal arrays and equal (seed, idx) pairs share innovations
    across covariance members and alternatives.
    """
    engine, sim_problem = _resolve_target(target, est_config)
    if not (isinstance(reps, (int, np.integer)) and reps >= 1):
        raise ValueError(f"reps must be an integer >= 1, got {reps}")
    if not (isinstance(seed, (int, np.integer)) and seed >= 0):
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (sim_problem.k,):
        raise ValueError(
            f"beta must have length {sim_problem.k}, got shape {beta.shape}"
        )
    n = sim_problem.n
    mu = sim_problem.X @ beta
    sampler = _make_sampler(cov, n)
    out = np.empty(int(reps))
    for idx in range(int(reps)):
        rng = np.random.default_rng(np.random.SeedSequence((int(seed), idx)))
        y = mu + sigma * sampler(rng)
        out[idx] = engine.result(y).t_value
    return out


def _binomial_ci(rate: float, reps: int) -> float:
    return 1.96 * float(np.sqrt(rate * (1.0 - rate) / reps))


def _check_reported_reps(reps: int) -> None:
    if reps < MIN_REPORTED_REPS:
        raise ValueError(
            f"reported probabilities need at least {MIN_REPORTED_REPS} "
            f"replications, got {reps}"
        )


def rejection_probability(
    target,
    mc: McConfig,
    critical_value: float,
    *,
    cov,
    beta=None,
    est_config: EstimatorConfig | None = None,
):
    """Monte Carlo P(T >= C) under one covariance member; returns (rate, ci)."""
    _check_reported_reps(mc.replications)
    _, sim_problem = _resolve_target(target, est_config)
    if beta is None:
        beta = null_point(sim_problem).beta0
    stats = simulate_statistics(
        target,
        cov=cov,
        beta=beta,
        reps=mc.replications,
        seed=mc.seed,
        sigma=mc.sigma,
        est_config=est_config,
    )
    rate = float(np.mean(stats >= critical_value))
    return rate, _binomial_ci(rate, mc.replications)


def empirical_size(
    target,
    mc: McConfig,
    critical_value: float,
    *,
    est_config: EstimatorConfig | None = None,
) -> SizeReport:
    """Worst-case null rejection rate over the whole covariance family."""
    _check_reported_reps(mc.replications)
    _, sim_problem = _resolve_target(target, est_config)
    beta0 = null_point(sim_problem).beta0
    points = []
    for label, rho, cov in _family_members(mc.family):
        stats = simulate_statistics(
            target,
            cov=cov,
            beta=beta0,
            reps=mc.replications,
            seed=mc.seed,
            sigma=mc.sigma,
            est_config=est_config,
        )
        rate = float(np.mean(stats >= critical_value))
        points.append(
            CurvePoint(label=label, rho=rho, distance=0.0,
                       rate=rate, ci=_binomial_ci(rate, mc.replications))
        )
    curve = SizePowerCurve(tuple(points))
    worst = max(points, key=lambda p: p.rate)
    return SizeReport(max_rate=worst.rate, argmax_label=worst.label, curve=curve)


def _refuse_unadjusted(problem: RegressionProblem) -> None:
    """Raise unless the unadjusted test is calibratable on this design."""
    try:
        selection = select_scenario(problem)
    except AugmentationImpossibleError as exc:
        raise CalibrationNotApplicableError(
            "a boundary direction degenerates the unadjusted statistic and "
            "the design is too small to augment; no critical value controls "
            "size here"
        ) from exc
    if selection.reason == REASON_ADJUSTMENT_UNNECESSARY:
        return
    if selection.applicable:
        raise CalibrationNotApplicableError(
            f"the unadjusted statistic degenerates along a boundary direction "
            f"(adjustment scenario {selection.scenario}); calibrate the "
            f"adjusted problem from build_adjusted instead"
        )
    raise CalibrationNotApplicableError(
        "a boundary direction lies in the regression span with a nonzero "
        "restriction image; size tends to one for every critical value"
    )


def calibrate_critical_value(
    target,
    mc: McConfig,
    delta: float,
    *,
    est_config: EstimatorConfig | None = None,
    tol: float | None = None,
) -> CalibrationResult:
    """Smallest critical value with worst-case empirical size <= delta.

    One statistic array per family member is simulated once and reused at
    every candidate C (common random numbers), so the empirical size is
    exactly nonincreasing in C; bisection brings it into [delta - tol,
    delta] unless the size function jumps over that window, in which case
    the conservative endpoint is returned.
    """
    if not (0.0 < delta <= 1.0):
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if tol is None:
        tol = delta / 10.0
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _check_reported_reps(mc.replications)
    if isinstance(target, RegressionProblem):
        _refuse_unadjusted(target)
    _, sim_problem = _resolve_target(target, est_config)
    beta0 = null_point(sim_problem).beta0

    members = _family_members(mc.family)
    sorted_stats = {}
    for label, _rho, cov in members:
        stats = simulate_statistics(
            target,
            cov=cov,
            beta=beta0,
            reps=mc.replications,
            seed=mc.seed,
            sigma=mc.sigma,
            est_config=est_config,
        )
        sorted_stats[label] = np.sort(stats)
    reps = mc.replications

    def rate_at(label: str, c: float) -> float:
        arr = sorted_stats[label]
        return float(reps - np.searchsorted(arr, c, side="left")) / reps

    def size_at(c: float) -> float:
        return max(rate_at(label, c) for label in sorted_stats)

    def rates_at(c: float) -> dict:
        return {label: rate_at(label, c) for label in sorted_stats}

    if size_at(0.0) <= delta:
        return CalibrationResult(
            critical_value=0.0, size=size_at(0.0), rates=rates_at(0.0),
            c_hi=0.0, delta=float(delta), tol=float(tol),
        )

    # reference start: a high quantile under the white member (rho = 0)
    ref_label = f"{0.0:g}"
    if ref_label in sorted_stats:
        ref = sorted_stats[ref_label]
    else:
        ref = np.sort(
            simulate_statistics(
                target, cov=0.0, beta=beta0, reps=reps,
                seed=mc.seed, sigma=mc.sigma, est_config=est_config,
            )
        )
    c_hi = float(np.quantile(ref, 1.0 - delta / 10.0))
    if c_hi <= 0.0:
        c_hi = 1.0
    while size_at(c_hi) > delta:
        c_hi *= 2.0

    lo, hi = 0.0, c_hi
    while size_at(hi) < delta - tol:
        if hi - lo <= 1e-12 * max(1.0, c_hi):
            break  # empirical size jumps over the target window
        mid = 0.5 * (lo + hi)
        if size_at(mid) <= delta:
            hi = mid
        else:
            lo = mid
    return CalibrationResult(
        critical_value=hi, size=size_at(hi), rates=rates_at(hi),
        c_hi=c_hi, delta=float(delta), tol=float(tol),
    )


def power_curve(
    target,
    mc: McConfig,
    critical_value: float,
    distances=None,
    *,
    est_config: EstimatorConfig | None = None,
    direction=None,
) -> SizePowerCurve:
    """Rejection rates across the family at alternatives R beta - r = d sigma u.

    ``distances`` are the standardized violation lengths d (0 reproduces the
    null); ``direction`` picks the unit vector u in restriction space
    (default: equal weights).  When ``distances`` is omitted, the explicit
    coefficient vectors in ``mc.beta_alternatives`` are used instead and
    labeled by their own standardized distances.
    """
    _check_reported_reps(mc.replications)
    _, sim_problem = _resolve_target(target, est_config)
    q = sim_problem.q
    beta0 = null_point(sim_problem).beta0
    alternatives = []
    if distances is None:
        if not mc.beta_alternatives:
            raise ValueError("provide distances or set beta_alternatives in McConfig")
        for beta in mc.beta_alternatives:
            beta = np.asarray(beta, dtype=float)
            gap = sim_problem.R @ beta - sim_problem.r
            alternatives.append((float(np.linalg.norm(gap)) / mc.sigma, beta))
    else:
        if direction is None:
            u = np.ones(q) / np.sqrt(q)
        else:
            u = np.asarray(direction, dtype=float)
            if u.shape != (q,):
                raise ValueError(f"direction must have length {q}, got shape {u.shape}")
            norm = float(np.linalg.norm(u))
            if norm == 0.0:
                raise ValueError("direction must be nonzero")
            u = u / norm
        pull = sim_problem.R.T @ np.linalg.solve(
            sim_problem.R @ sim_problem.R.T, u
        )
        for d in distances:
            d = float(d)
            if d < 0:
                raise ValueError(f"distances must be nonnegative, got {d}")
            alternatives.append((d, beta0 + d * mc.sigma * pull))

    points = []
    for label, rho, cov in _family_members(mc.family):
        for d, beta in alternatives:
            stats = simulate_statistics(
                target,
                cov=cov,
                beta=beta,
                reps=mc.replications,
                seed=mc.seed,
                sigma=mc.sigma,
                est_config=est_config,
            )
            rate = float(np.mean(stats >= critical_value))
            points.append(
                CurvePoint(label=label, rho=rho, distance=d,
                           rate=rate, ci=_binomial_ci(rate, mc.replications))
            )
    return SizePowerCurve(tuple(points))
