"""VAR-prewhitened long-run covariance estimation.

The estimator runs in three steps on the score series ``V = X' diag(u)`` of
OLS residuals ``u``:

1. fit a VAR(p) to ``V`` by least squares, keeping coefficient blocks
   ``A = (A_1, ..., A_p)`` and residuals ``Z``;
2. smooth the sample autocovariances of ``Z`` with kernel weights
   ``kappa(i / M)`` at a (possibly data-driven) bandwidth ``M``;
3. "recolor" through ``D = I - sum_l A_l``:  ``Psi = D^{-1} Psi_white D^{-T}``,
   and form ``Omega = n R (X'X)^{-1} Psi (X'X)^{-1} R'``.

The estimator is *undefined* at some response vectors — the VAR regressor
matrix can be rank deficient (I), the recoloring matrix singular (II), or the
bandwidth undefined (III).  Those outcomes are data, not errors: they are
returned as typed :class:`OmegaOutcome` values, classified in the fixed
precedence (I) -> (II) -> (III).

``Omega`` also has an exact Toeplitz representation
``Omega = (n/(n-p)) * B W B'`` with ``B = R (X'X)^{-1} D^{-1} Z`` and ``W`` the
kernel Toeplitz weight matrix; this module assembles ``Omega`` from the lag
sums of step 2, leaving the representation as an independent cross-check
(see the test suite), and exposes ``B`` because the definiteness of ``Omega``
is exactly the row rank of ``B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import EPS, solve_well_conditioned, symmetrize
from .bandwidth import BandwidthOutcome, BandwidthRule, compute_bandwidth
from .kernels import KernelSpec
from .model import RegressionProblem

#: OmegaOutcome.status values
WELL_DEFINED = "well-defined"
UNDEFINED = "undefined"

#: OmegaOutcome.reason values, in precedence order
VAR_RANK_DEFICIENT = "VarRankDeficient"
RECOLOR_SINGULAR = "RecolorSingular"
BANDWIDTH_UNDEFINED = "BandwidthUndefined"

#: classify_definiteness results
POSITIVE_DEFINITE = "PositiveDefinite"
SINGULAR_NONNEG = "SingularNonneg"
ZERO = "Zero"


@dataclass(frozen=True)
class EstimatorConfig:
    """Kernel, bandwidth rule, and VAR order of the covariance estimator."""

    kernel: KernelSpec
    rule: BandwidthRule
    p: int = 1

    def __post_init__(self):
        if not (isinstance(self.p, (int, np.integer)) and self.p >= 1):
            raise ValueError(f"VAR order p must be an integer >= 1, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    def validate_for(self, problem: RegressionProblem) -> None:
        """Check the p range constraint 1 <= p <= n/(k+1) against a problem."""
        n, k = problem.n, problem.k
        if self.p * (k + 1) > n:
            raise ValueError(
                f"p must satisfy 1 <= p <= n/(k+1); got p = {self.p} with "
                f"n = {n}, k = {k}"
            )


@dataclass(frozen=True, eq=False)
class PrewhitenFit:
    """Step-1 output: score series, VAR pieces, residuals, recoloring inverse.

    ``recolor`` is ``(I - sum_l A_l)^{-1}``, or None when that matrix is
    numerically singular (undefinedness condition (II)).
    """

    V: np.ndarray
    V1: np.ndarray
    Vp: np.ndarray
    A: np.ndarray
    Z: np.ndarray
    recolor: np.ndarray | None


@dataclass(frozen=True, eq=False)
class OmegaOutcome:
    """Either the assembled covariance estimate or a typed undefinedness.

    When well-defined: ``omega`` is the q x q restriction covariance,
    ``psi`` the recolored k x k long-run matrix, ``m`` the bandwidth value,
    ``B`` the q x (n-p) matrix whose row rank determines definiteness, and
    ``fit`` the step-1 pieces.  ``bandwidth`` carries the rule outcome
    (including the undefinedness sub-reason when status is undefined at
    step III).
    """

    status: str
    reason: str | None = None
    omega: np.ndarray | None = None
    psi: np.ndarray | None = None
    m: float | None = None
    B: np.ndarray | None = None
    fit: PrewhitenFit | None = None
    bandwidth: BandwidthOutcome | None = None

    @classmethod
    def not_defined(cls, reason: str, bandwidth: BandwidthOutcome | None = None) -> "OmegaOutcome":
        return cls(status=UNDEFINED, reason=reason, bandwidth=bandwidth)

    @property
    def well_defined(self) -> bool:
        return self.status == WELL_DEFINED


class _VarFitter:
    """Per-(problem, p) precomputation for repeated step-1 fits."""

    def __init__(self, problem: RegressionProblem, p: int):
        if not (isinstance(p, (int, np.integer)) and p >= 1):
            raise ValueError(f"VAR order p must be an integer >= 1, got {p}")
        if p * (problem.k + 1) > problem.n:
            raise ValueError(
                f"p must satisfy 1 <= p <= n/(k+1); got p = {p} with "
                f"n = {problem.n}, k = {problem.k}"
            )
        self.problem = problem
        self.p = int(p)
        X = problem.X
        n, k = problem.n, problem.k
        xtx = X.T @ X
        self.beta_op = np.linalg.solve(xtx, X.T)  # (X'X)^{-1} X'
        self.annihilator = np.eye(n) - X @ self.beta_op
        self._eye_k = np.eye(k)
        # below this, an OLS residual norm is indistinguishable from the
        # roundoff of projecting a vector that lies in span(X)
        self._resid_tol = max(n, k) * EPS

    def beta_hat(self, y: np.ndarray) -> np.ndarray:
        return self.beta_op @ y

    def fit(self, y: np.ndarray) -> PrewhitenFit | None:
        """Run step 1 at y; None means the VAR regressor matrix is rank deficient."""
        X = self.problem.X
        n, k, p = self.problem.n, self.problem.k, self.p
        u = self.annihilator @ y
        if np.linalg.norm(u) <= self._resid_tol * np.linalg.norm(y):
            return None  # y in span(X): scores are exactly zero
        V = X.T * u
        V1 = np.vstack([V[:, p - l : n - l] for l in range(1, p + 1)])
        Vp = V[:, p:]
        s = np.linalg.svd(V1, compute_uv=False)
        if s[0] == 0.0 or np.count_nonzero(s > max(V1.shape) * EPS * s[0]) < k * p:
            return None
        # normal equations, not an SVD solve: structurally-zero cross
        # products must give an exactly zero coefficient block
        A = np.linalg.solve(V1 @ V1.T, V1 @ Vp.T).T
        D = self._eye_k - A.reshape(k, p, k).sum(axis=1)
        recolor = solve_well_conditioned(D, self._eye_k)
        Z = Vp - A @ V1
        return PrewhitenFit(V=V, V1=V1, Vp=Vp, A=A, Z=Z, recolor=recolor)


class OmegaEngine:
    """Assembles the covariance estimate repeatedly for one (problem, config).

    Precomputes everything that depends only on the design so Monte Carlo
    loops pay per response vector only for the data-dependent steps.
    """

    def __init__(self, problem: RegressionProblem, config: EstimatorConfig):
        config.validate_for(problem)
        self.problem = problem
        self.config = config
        self._fitter = _VarFitter(problem, config.p)
        xtx = problem.X.T @ problem.X
        self.g = np.linalg.solve(xtx, problem.R.T).T  # R (X'X)^{-1}, q x k

    def beta_hat(self, y: np.ndarray) -> np.ndarray:
        return self._fitter.beta_hat(y)

    def fit(self, y: np.ndarray) -> PrewhitenFit | None:
        return self._fitter.fit(y)

    def outcome(self, y: np.ndarray) -> OmegaOutcome:
        problem, config = self.problem, self.config
        n, p = problem.n, config.p
        fit = self._fitter.fit(y)
        if fit is None:
            return OmegaOutcome.not_defined(VAR_RANK_DEFICIENT)
        if fit.recolor is None:
            return OmegaOutcome.not_defined(RECOLOR_SINGULAR)
        bw = compute_bandwidth(config.rule, fit.Z, n, p)
        if not bw.is_defined:
            return OmegaOutcome.not_defined(BANDWIDTH_UNDEFINED, bandwidth=bw)
        psi_white = _kernel_lag_sum(fit.Z, config.kernel, bw.m)
        psi = symmetrize(fit.recolor @ psi_white @ fit.recolor.T)
        omega = symmetrize(n * self.g @ psi @ self.g.T)
        B = (self.g @ fit.recolor) @ fit.Z
        return OmegaOutcome(
            status=WELL_DEFINED, omega=omega, psi=psi, m=bw.m, B=B, fit=fit, bandwidth=bw
        )


def _kernel_lag_sum(Z: np.ndarray, kernel: KernelSpec, m_value: float) -> np.ndarray:
    """Step 2: sum_{|i| < m} kappa(i / M) Gamma_i, with the M = 0 convention.

    At M = 0 only the lag-zero term survives (off-lag weights are zero by
    convention), so the sum collapses to Gamma_0.
    """
    k, m = Z.shape
    psi = Z @ Z.T
    if m_value > 0.0 and m > 1:
        w = kernel.evaluate(np.arange(1, m) / m_value)
        for i in np.nonzero(w)[0]:
            lag = int(i) + 1
            s = Z[:, lag:] @ Z[:, : m - lag].T
            psi += w[i] * (s + s.T)
    return psi / m


def fit_var_ols(problem: RegressionProblem, y, p: int) -> PrewhitenFit | None:
    """Step 1 alone: fit the VAR(p) to the score series of y.

    Returns None when the VAR regressor matrix is rank deficient at the
    numeric tolerance (undefinedness condition (I)); the zero-score case
    ``y in span(X)`` lands there because the residual — hence every score —
    vanishes.
    """
    return _VarFitter(problem, p).fit(np.asarray(y, dtype=float))


def compute_gamma(Z: np.ndarray, i: int) -> np.ndarray:
    """Sample autocovariance ``Gamma_i = (n-p)^{-1} sum_{j>i} Z_j Z_{j-i}'``.

    Negative lags are the transposes of the positive ones.
    """
    Z = np.asarray(Z, dtype=float)
    k, m = Z.shape
    ai = abs(int(i))
    if ai > m - 1:
        raise ValueError(f"lag must satisfy |i| <= {m - 1}, got {i}")
    s = Z[:, ai:] @ Z[:, : m - ai].T / m
    return s if i >= 0 else s.T


def assemble_omega(problem: RegressionProblem, y, config: EstimatorConfig) -> OmegaOutcome:
    """Run the full three-step pipeline at one response vector."""
    return OmegaEngine(problem, config).outcome(np.asarray(y, dtype=float))


def classify_definiteness(outcome: OmegaOutcome) -> str:
    """Classify a well-defined estimate by the numeric row rank of B.

    The estimate is always nonnegative definite; it is singular exactly when
    ``rank(B) < q`` and zero exactly when ``B = 0``, so the SVD of B decides
    the class without eigenvalue thresholding on the assembled matrix.

    The numeric rank is additionally capped by a structural fact: the VAR
    residual rows are orthogonal to the rowspace of the kp regressor rows,
    so the true Z (hence B) has rank at most ``m - kp``.  Least-squares
    roundoff puts full-rank dust into the computed Z; in the undersized
    regime ``m - kp < q`` (where the statistic degenerates identically)
    that dust would otherwise masquerade as a positive definite estimate.
    """
    if not outcome.well_defined:
        raise ValueError("classification requires a well-defined covariance outcome")
    B = outcome.B
    s = np.linalg.svd(B, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return ZERO
    rank = int(np.count_nonzero(s > max(B.shape) * EPS * s[0]))
    if outcome.fit is not None:
        m = outcome.fit.Z.shape[1]
        kp = outcome.fit.V1.shape[0]
        rank = min(rank, max(m - kp, 0))
    return SINGULAR_NONNEG if rank < B.shape[0] else POSITIVE_DEFINITE
