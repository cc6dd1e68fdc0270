"""Linear model containers, covariance families, and exact Gaussian AR(1) sampling.

The testing problem is the Gaussian linear regression ``y = X beta + u`` with
``Cov(u) = sigma^2 * Sigma`` for an unknown correlation matrix ``Sigma``, and
the hypothesis ``R beta = r``.  This module holds the problem container, the
covariance families that Monte Carlo studies range over, the AR(1) correlation
matrix ``Lambda(rho)`` with entries ``rho**|i-j|``, and exact sampling from it.

The constant vector ``e_plus = (1, ..., 1)`` and the alternating vector
``e_minus = (-1, 1, -1, ...)`` are the rank-one limits of ``Lambda(rho)`` as
``rho -> 1`` and ``rho -> -1``; probability mass concentrates along them for
strongly dependent errors, which is what the diagnostics module probes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import numeric_rank, readonly


def as_generator(seed) -> np.random.Generator:
    """Coerce ``None`` / int / SeedSequence / Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """A linear regression with a linear hypothesis ``R beta = r``.

    Parameters
    ----------
    X : (n, k) ndarray
        Design matrix with full column rank; requires n > 2 and 1 <= k < n.
    R : (q, k) ndarray
        Restriction matrix with full row rank, 1 <= q <= k.
    r : (q,) ndarray
        Restriction value.
    y : (n,) ndarray, optional
        Observed response; most operations take y separately so one problem
        can be evaluated at many response vectors.
    """

    X: np.ndarray
    R: np.ndarray
    r: np.ndarray
    y: np.ndarray | None = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        n, k = X.shape
        if n <= 2:
            raise ValueError(f"need n > 2 observations, got n = {n}")
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got k = {k}, n = {n}")
        if numeric_rank(X) < k:
            raise ValueError("X must have full column rank k")
        q = R.shape[0]
        if R.shape[1] != k:
            raise ValueError(f"R has {R.shape[1]} columns, expected k = {k}")
        if not 1 <= q <= k:
            raise ValueError(f"need 1 <= q <= k, got q = {q}, k = {k}")
        if numeric_rank(R) < q:
            raise ValueError("R must have full row rank q")
        if r.shape != (q,):
            raise ValueError(f"r has length {r.size}, expected q = {q}")
        object.__setattr__(self, "X", readonly(X))
        object.__setattr__(self, "R", readonly(R))
        object.__setattr__(self, "r", readonly(r))
        if self.y is not None:
            y = np.atleast_1d(np.asarray(self.y, dtype=float))
            if y.shape != (n,):
                raise ValueError(f"y has length {y.size}, expected n = {n}")
            object.__setattr__(self, "y", readonly(y))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    @property
    def q(self) -> int:
        return self.R.shape[0]


@dataclass(frozen=True, eq=False)
class NullPoint:
    """A point ``mu0 = X beta0`` in the null set (``R beta0 = r``)."""

    mu0: np.ndarray
    beta0: np.ndarray


@dataclass(frozen=True)
class AR1Grid:
    """Covariance family {Lambda(rho) : rho in rhos}, each rho in (-1, 1)."""

    rhos: tuple[float, ...]

    def __post_init__(self):
        rhos = tuple(float(v) for v in self.rhos)
        if not rhos:
            raise ValueError("rho grid must be non-empty")
        for v in rhos:
            if not abs(v) < 1.0:
                raise ValueError(f"AR(1) parameter must satisfy |rho| < 1, got {v}")
        object.__setattr__(self, "rhos", rhos)


@dataclass(frozen=True)
class AR1Restricted:
    """AR(1) family bounded away from the -1 boundary: rho in (-1+epsilon, 1)."""

    epsilon: float
    rhos: tuple[float, ...]

    def __post_init__(self):
        eps = float(self.epsilon)
        if not 0.0 < eps <= 1.0:
            raise ValueError(f"epsilon must lie in (0, 1], got {eps}")
        rhos = tuple(float(v) for v in self.rhos)
        if not rhos:
            raise ValueError("rho grid must be non-empty")
        for v in rhos:
            if not (-1.0 + eps < v < 1.0):
                raise ValueError(
                    f"rho = {v} outside the restricted range (-1+epsilon, 1) "
                    f"with epsilon = {eps}"
                )
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "rhos", rhos)


@dataclass(frozen=True, eq=False)
class ExplicitList:
    """Covariance family given by explicit SPD correlation matrices."""

    matrices: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        mats = []
        if len(self.matrices) == 0:
            raise ValueError("explicit covariance family must be non-empty")
        for i, m in enumerate(self.matrices):
            m = np.atleast_2d(np.asarray(m, dtype=float))
            if m.shape[0] != m.shape[1]:
                raise ValueError(f"covariance matrix {i} is not square")
            if not np.allclose(m, m.T):
                raise ValueError(f"covariance matrix {i} is not symmetric")
            try:
                np.linalg.cholesky(m)
            except np.linalg.LinAlgError:
                raise ValueError(f"covariance matrix {i} is not positive definite")
            mats.append(readonly(m))
        object.__setattr__(self, "matrices", tuple(mats))


CovarianceFamily = AR1Grid | AR1Restricted | ExplicitList


def constant_vector(n: int) -> np.ndarray:
    """The all-ones vector e_plus, the rho -> 1 concentration direction."""
    return np.ones(int(n))


def alternating_vector(n: int) -> np.ndarray:
    """The vector e_minus = (-1, 1, -1, ...), the rho -> -1 direction."""
    return (-1.0) ** np.arange(1, int(n) + 1)


def ar1_matrix(rho: float, n: int) -> np.ndarray:
    """AR(1) correlation matrix Lambda(rho) with entries rho**|i-j|.

    Parameters
    ----------
    rho : float
        Autocorrelation parameter, |rho| < 1.
    n : int
        Dimension, n >= 1.
    """
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise ValueError(f"AR(1) parameter must satisfy |rho| < 1, got {rho}")
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    idx = np.arange(n)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def _ar1_path(rho: float, z: np.ndarray) -> np.ndarray:
    """Run the exact AR(1) recursion u_1 = z_1, u_t = rho u_{t-1} + sqrt(1-rho^2) z_t.

    The recursion gives Cov(u) = Lambda(rho) exactly and stays numerically
    stable as rho -> +-1, unlike factorizing a near-singular Lambda(rho).
    """
    scale = np.sqrt(1.0 - rho * rho)
    zl = z.tolist()
    out = [zl[0]]
    prev = zl[0]
    for t in range(1, len(zl)):
        prev = rho * prev + scale * zl[t]
        out.append(prev)
    return np.array(out)


def sample_gaussian_ar1(rho: float, sigma: float, mu, n: int, seed) -> np.ndarray:
    """Draw ``y = mu + sigma * u`` with u a stationary Gaussian AR(1) path.

    Parameters
    ----------
    rho : float
        AR(1) parameter, |rho| < 1.
    sigma : float
        Error scale, > 0.
    mu : float or (n,) ndarray
        Mean vector (scalar broadcasts).
    n : int
        Length of the path.
    seed : int, SeedSequence, Generator or None
        Source of randomness; identical seeds yield identical draws.
    """
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise ValueError(f"AR(1) parameter must satisfy |rho| < 1, got {rho}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    rng = as_generator(seed)
    u = _ar1_path(rho, rng.standard_normal(int(n)))
    return np.asarray(mu, dtype=float) + float(sigma) * u


def null_point(problem: RegressionProblem) -> NullPoint:
    """The minimum-norm null point: beta0 = R'(RR')^{-1} r, mu0 = X beta0.

    Any null point is equivalent for the statistic (it is invariant under
    shifts inside the null set), so the minimum-norm choice is just a
    canonical representative.
    """
    R, r = problem.R, problem.r
    if numeric_rank(R) < problem.q:
        raise ValueError("hypothesis is degenerate: R must have full row rank q")
    beta0 = R.T @ np.linalg.solve(R @ R.T, r)
    return NullPoint(mu0=readonly(problem.X @ beta0), beta0=readonly(beta0))


def ma_closure_matrix(alpha, n: int) -> np.ndarray:
    """Correlation matrix of the MA(d) process with coefficients ``alpha``.

    The lag-h autocorrelation is ``sum_j alpha_j alpha_{j+h} / sum_j alpha_j**2``
    for |h| <= d and exactly zero beyond, so the result is banded with unit
    diagonal.  ``alpha`` is normalized with leading coefficient 1.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if alpha.ndim != 1 or alpha.size == 0:
        raise ValueError("alpha must be a non-empty coefficient vector")
    if alpha[0] != 1.0:
        raise ValueError("leading MA coefficient alpha_0 must equal 1")
    n = int(n)
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    d = alpha.size - 1
    total = float(alpha @ alpha)
    gamma = np.zeros(n)
    gamma[0] = 1.0
    for h in range(1, min(d, n - 1) + 1):
        gamma[h] = float(alpha[: d + 1 - h] @ alpha[h:]) / total
    idx = np.arange(n)
    return gamma[np.abs(idx[:, None] - idx[None, :])]
