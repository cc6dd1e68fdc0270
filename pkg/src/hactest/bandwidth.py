"""Bandwidth rules computed from the prewhitened residual matrix Z.

Three rules are provided:

* :class:`AndrewsRule` — fits univariate AR(1) models to the rows of Z by
  OLS and plugs the fitted parameters into one of two weighted ratios
  (``j = 1`` or ``j = 2``), giving ``M = c1 * (alpha_j * n)**c2``.
* :class:`NeweyWestRule` — the "real-bandwidth" nonparametric rule built
  from weighted autocovariances of the scalar series ``omega' Z``.
* :class:`FixedBRule` — a deterministic bandwidth, either proportional to
  the residual length (``M = b * (n - p)``) or an explicit constant.

The data-driven rules can be *undefined* at degenerate inputs (an exact-zero
denominator, a unit AR(1) root); that is reported as a typed
:class:`BandwidthOutcome` rather than an exception, because undefinedness of
the estimator at specific response vectors is part of the object under study.
Zero-denominator detection is exact-zero on the computed floating-point sums,
not tolerance-based: the degenerate set has Lebesgue measure zero and is only
hit by constructed inputs, and a tolerance would spuriously flag
near-degenerate but valid data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import BARTLETT_NAME, PARZEN_NAME, QS_NAME, KernelSpec

#: reasons a data-driven bandwidth can be undefined
RHO_UNDEFINED = "RhoUndefined"
RHO_UNIT = "RhoUnit"
SIGMA_ALL_ZERO = "SigmaAllZero"
DENOMINATOR_ZERO = "DenominatorZero"

#: omega presets accepted wherever a weight vector is expected
OMEGA_PRESETS = ("ones", "zero-first")


@dataclass(frozen=True)
class BandwidthOutcome:
    """Either a defined bandwidth value or a typed reason it is undefined."""

    m: float | None
    reason: str | None = None

    @classmethod
    def of(cls, m: float) -> "BandwidthOutcome":
        if not (math.isfinite(m) and m >= 0.0):
            raise ValueError(f"defined bandwidth must be finite and >= 0, got {m}")
        return cls(m=float(m))

    @classmethod
    def undefined(cls, reason: str) -> "BandwidthOutcome":
        return cls(m=None, reason=reason)

    @property
    def is_defined(self) -> bool:
        return self.m is not None


def resolve_omega(omega, k: int) -> np.ndarray:
    """Materialize an omega spec ("ones", "zero-first", or explicit) for k rows."""
    if isinstance(omega, str):
        if omega == "ones":
            return np.ones(k)
        if omega == "zero-first":
            if k < 2:
                raise ValueError('omega preset "zero-first" needs k >= 2 (weights must not be all zero)')
            out = np.ones(k)
            out[0] = 0.0
            return out
        raise ValueError(f"unknown omega preset {omega!r}; presets: {OMEGA_PRESETS}")
    out = np.atleast_1d(np.asarray(omega, dtype=float))
    if out.shape != (k,):
        raise ValueError(f"omega has length {out.size}, expected k = {k}")
    if np.any(out < 0):
        raise ValueError("omega weights must be nonnegative")
    if not np.any(out > 0):
        raise ValueError("omega weights must not be all zero")
    return out


def _validate_omega_field(omega):
    if isinstance(omega, str):
        if omega not in OMEGA_PRESETS:
            raise ValueError(f"unknown omega preset {omega!r}; presets: {OMEGA_PRESETS}")
        return omega
    out = tuple(float(v) for v in np.atleast_1d(np.asarray(omega, dtype=float)))
    if any(v < 0 for v in out):
        raise ValueError("omega weights must be nonnegative")
    if not any(v > 0 for v in out):
        raise ValueError("omega weights must not be all zero")
    return out


@dataclass(frozen=True)
class AndrewsRule:
    """AR(1) plug-in bandwidth ``M = c1 * (alpha_j * n)**c2``.

    Parameters
    ----------
    j : {1, 2}
        Which weighted ratio of fitted AR(1) parameters to use.
    c1, c2 : float
        Positive constants; see :func:`default_rule` for the per-kernel
        defaults.
    omega : "ones", "zero-first", or sequence of float
        Nonnegative row weights (not all zero), resolved against the row
        count of Z when the bandwidth is computed.
    """

    j: int
    c1: float
    c2: float
    omega: str | tuple[float, ...] = "ones"

    def __post_init__(self):
        if self.j not in (1, 2):
            raise ValueError(f"j must be 1 or 2, got {self.j}")
        if not self.c1 > 0:
            raise ValueError(f"c1 must be positive, got {self.c1}")
        if not self.c2 > 0:
            raise ValueError(f"c2 must be positive, got {self.c2}")
        object.__setattr__(self, "omega", _validate_omega_field(self.omega))


@dataclass(frozen=True)
class NeweyWestRule:
    """Nonparametric (real-bandwidth) rule ``M = cbar2 * ((num/den)**2 * n)**cbar3``.

    ``num`` and ``den`` are lag-weighted sums of the autocovariances of the
    scalar series ``omega' Z``; ``weights`` selects the lag weights:

    * ``None`` — rectangular weights with the conventional cutoff
      ``floor(4 * (n/100)**(2/9))``;
    * an int — rectangular weights with that cutoff;
    * a sequence — explicit nonnegative weights indexed by |lag|, with
      weight 1 at lag zero (padded with zeros beyond its length).

    ``cbar1`` must be a positive integer (a zero exponent is not a valid
    member of this rule family).
    """

    cbar1: int
    cbar2: float
    cbar3: float
    omega: str | tuple[float, ...] = "ones"
    weights: int | tuple[float, ...] | None = None

    def __post_init__(self):
        if not (isinstance(self.cbar1, (int, np.integer)) and self.cbar1 >= 1):
            raise ValueError(f"cbar1 must be a positive integer, got {self.cbar1}")
        if not self.cbar2 > 0:
            raise ValueError(f"cbar2 must be positive, got {self.cbar2}")
        if not self.cbar3 > 0:
            raise ValueError(f"cbar3 must be positive, got {self.cbar3}")
        object.__setattr__(self, "cbar1", int(self.cbar1))
        object.__setattr__(self, "omega", _validate_omega_field(self.omega))
        w = self.weights
        if w is None:
            return
        if isinstance(w, (int, np.integer)) and not isinstance(w, bool):
            if w < 0:
                raise ValueError(f"rectangular weight cutoff must be >= 0, got {w}")
            object.__setattr__(self, "weights", int(w))
            return
        w = tuple(float(v) for v in np.atleast_1d(np.asarray(w, dtype=float)))
        if not w or w[0] != 1.0:
            raise ValueError("explicit lag weights must start with w(0) = 1")
        if any(v < 0 for v in w):
            raise ValueError("lag weights must be nonnegative")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class FixedBRule:
    """Deterministic bandwidth: ``M = b * (n - p)`` with b in (0, 1], or a constant m."""

    b: float | None = None
    m: float | None = None

    def __post_init__(self):
        if (self.b is None) == (self.m is None):
            raise ValueError("specify exactly one of b (fraction) or m (explicit bandwidth)")
        if self.b is not None and not 0.0 < self.b <= 1.0:
            raise ValueError(f"b must lie in (0, 1], got {self.b}")
        if self.m is not None and not self.m > 0:
            raise ValueError(f"explicit bandwidth must be positive, got {self.m}")


BandwidthRule = AndrewsRule | NeweyWestRule | FixedBRule

#: config names for the rules
RULE_NAMES = ("andrews", "newey-west", "fixed-b")

_AM_DEFAULTS = {
    BARTLETT_NAME: (1, 1.1447, 1.0 / 3.0),
    QS_NAME: (2, 1.13221, 1.0 / 5.0),
}
# Conventional plug-in constants per kernel for the Newey-West style rule.
_NW_DEFAULTS = {
    BARTLETT_NAME: (1, 1.1447, 1.0 / 3.0),
    PARZEN_NAME: (2, 2.6614, 1.0 / 5.0),
    QS_NAME: (2, 1.3221, 1.0 / 5.0),
}


def default_rule(kind: str, kernel, omega="ones") -> BandwidthRule:
    """Build a rule of the given kind with the standard constants for ``kernel``.

    ``kernel`` may be a :class:`~hactest.kernels.KernelSpec` or its name.
    There is no standard Andrews-style constant pair for the Parzen kernel;
    construct :class:`AndrewsRule` explicitly in that case.
    """
    if not isinstance(kernel, str):
        kernel = kernel.name
    if kind == "andrews":
        if kernel not in _AM_DEFAULTS:
            raise ValueError(
                f"no default (j, c1, c2) for the andrews rule with kernel "
                f"{kernel!r}; construct AndrewsRule with explicit constants"
            )
        j, c1, c2 = _AM_DEFAULTS[kernel]
        return AndrewsRule(j=j, c1=c1, c2=c2, omega=omega)
    if kind == "newey-west":
        if kernel not in _NW_DEFAULTS:
            raise ValueError(
                f"no default (cbar1, cbar2, cbar3) for the newey-west rule with "
                f"kernel {kernel!r}; construct NeweyWestRule explicitly"
            )
        c1, c2, c3 = _NW_DEFAULTS[kernel]
        return NeweyWestRule(cbar1=c1, cbar2=c2, cbar3=c3, omega=omega)
    if kind == "fixed-b":
        return FixedBRule(b=1.0)
    raise ValueError(f"unknown bandwidth rule {kind!r}; rules: {RULE_NAMES}")


def bandwidth_am(Z: np.ndarray, rule: AndrewsRule, n: int) -> BandwidthOutcome:
    """Andrews-style AR(1) plug-in bandwidth from the residual matrix Z.

    Row i of Z gets a fitted AR(1) coefficient
    ``rho_i = sum_{j>=2} Z_ij Z_i(j-1) / sum_{j<=m-1} Z_ij^2`` and innovation
    variance ``sigma_i^2 = (m-1)^{-1} sum_{j>=2} (Z_ij - rho_i Z_i(j-1))^2``
    where m is the number of columns; the weighted ratios alpha_1/alpha_2
    combine them across rows.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValueError("Z must be a k x (n-p) matrix")
    k, m = Z.shape
    if m < 2:
        raise ValueError(f"need at least 2 residual columns, got {m}")
    omega = resolve_omega(rule.omega, k)

    lead, lag = Z[:, 1:], Z[:, :-1]
    den_rho = np.einsum("ij,ij->i", lag, lag)
    if np.any(den_rho == 0.0):
        return BandwidthOutcome.undefined(RHO_UNDEFINED)
    rho = np.einsum("ij,ij->i", lead, lag) / den_rho
    if np.any(rho * rho == 1.0):
        return BandwidthOutcome.undefined(RHO_UNIT)
    resid = lead - rho[:, None] * lag
    sigma2 = np.einsum("ij,ij->i", resid, resid) / (m - 1)

    one_minus = 1.0 - rho
    s4 = sigma2 * sigma2
    den_alpha = float(omega @ (s4 / one_minus**4))
    if den_alpha == 0.0:
        return BandwidthOutcome.undefined(SIGMA_ALL_ZERO)
    if rule.j == 1:
        num_alpha = float(omega @ (4.0 * rho**2 * s4 / (one_minus**6 * (1.0 + rho) ** 2)))
    else:
        num_alpha = float(omega @ (4.0 * rho**2 * s4 / one_minus**8))
    alpha = num_alpha / den_alpha
    return BandwidthOutcome.of(rule.c1 * (alpha * n) ** rule.c2)


def rectangular_cutoff(n: int) -> int:
    """The conventional rectangular lag-weight cutoff floor(4 (n/100)^{2/9})."""
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def _nw_weights(rule: NeweyWestRule, m: int, n: int) -> np.ndarray:
    w = rule.weights
    if w is None or isinstance(w, int):
        cutoff = rectangular_cutoff(n) if w is None else w
        out = np.zeros(m)
        out[: min(cutoff + 1, m)] = 1.0
        return out
    out = np.zeros(m)
    take = min(len(w), m)
    out[:take] = w[:take]
    return out


def bandwidth_nw(Z: np.ndarray, rule: NeweyWestRule, n: int) -> BandwidthOutcome:
    """Newey-West style real-bandwidth rule from the residual matrix Z.

    With ``s = omega' Z`` and autocovariances
    ``sbar_i = m^{-1} sum_{j>|i|} s_j s_{j-|i|}``, the bandwidth is
    ``cbar2 * ((num/den)**2 * n)**cbar3`` where ``den = sum_i w(i) sbar_i``
    and ``num = sum_i |i|**cbar1 w(i) sbar_i`` over |i| < m.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValueError("Z must be a k x (n-p) matrix")
    k, m = Z.shape
    omega = resolve_omega(rule.omega, k)

    s = omega @ Z
    sbar = np.empty(m)
    for i in range(m):
        sbar[i] = s[i:] @ s[: m - i] / m
    w = _nw_weights(rule, m, n)
    lags = np.arange(m)
    # the |i| sums run over negative and positive lags; sbar is even in the lag
    den = float(w[0] * sbar[0] + 2.0 * (w[1:] @ sbar[1:]))
    if den == 0.0:
        return BandwidthOutcome.undefined(DENOMINATOR_ZERO)
    num = float(2.0 * ((lags[1:] ** rule.cbar1 * w[1:]) @ sbar[1:]))
    return BandwidthOutcome.of(rule.cbar2 * ((num / den) ** 2 * n) ** rule.cbar3)


def bandwidth_kv(rule: FixedBRule, n: int, p: int) -> BandwidthOutcome:
    """Fixed bandwidth: b * (n - p), or the explicit constant; never undefined."""
    if not 1 <= p < n:
        raise ValueError(f"need 1 <= p < n, got p = {p}, n = {n}")
    if rule.m is not None:
        return BandwidthOutcome.of(rule.m)
    return BandwidthOutcome.of(rule.b * (n - p))


def compute_bandwidth(rule: BandwidthRule, Z: np.ndarray | None, n: int, p: int) -> BandwidthOutcome:
    """Dispatch to the rule-specific bandwidth computation."""
    if isinstance(rule, AndrewsRule):
        return bandwidth_am(Z, rule, n)
    if isinstance(rule, NeweyWestRule):
        return bandwidth_nw(Z, rule, n)
    if isinstance(rule, FixedBRule):
        return bandwidth_kv(rule, n, p)
    raise TypeError(f"unknown bandwidth rule type {type(rule).__name__}")
