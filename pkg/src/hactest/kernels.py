"""Covariance-weighting kernels and the Toeplitz weight matrix they induce.

A kernel here is an even function with kappa(0) = 1 whose Toeplitz matrices
``[kappa((i-j)/s)]`` are positive definite for every scale ``s > 0`` — the
property that makes the long-run covariance estimator nonnegative definite.
Built-ins are the Bartlett, Parzen and Quadratic Spectral kernels; custom
kernels can be registered but must pass the same positive-definiteness check.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

#: kernel names accepted in configs and on the command line
BARTLETT_NAME = "bartlett"
PARZEN_NAME = "parzen"
QS_NAME = "qs"


@dataclass(frozen=True)
class KernelSpec:
    """A kernel function together with its smoothness metadata.

    Attributes
    ----------
    name : str
        Registry/config name.
    evaluate : callable
        Vectorized evaluation; must be even with evaluate(0) = 1.
    nondifferentiable_points : tuple of float
        Points on (0, inf) where the kernel is not C^1 (used by the
        gradient-existence check); the mirror points are implied by evenness.
    compact_support : bool
        Whether the kernel vanishes outside a bounded interval.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    nondifferentiable_points: tuple[float, ...]
    compact_support: bool


def kernel_eval(kernel: KernelSpec, x):
    """Evaluate a kernel at scalar or array ``x`` (returns float for scalars)."""
    out = kernel.evaluate(np.asarray(x, dtype=float))
    if np.ndim(out) == 0:
        return float(out)
    return out


def _bartlett(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return np.where(ax < 1.0, 1.0 - ax, 0.0)


def _parzen(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    out = np.zeros_like(ax)
    inner = ax <= 0.5
    outer = ~inner & (ax <= 1.0)
    ai = ax[inner]
    out[inner] = 1.0 - 6.0 * ai * ai + 6.0 * ai * ai * ai
    ao = 1.0 - ax[outer]
    out[outer] = 2.0 * ao * ao * ao
    return out


def _quadratic_spectral(x: np.ndarray) -> np.ndarray:
    # closed form 25/(12 pi^2 x^2) * (sin(z)/z - cos(z)) with z = 6 pi x / 5,
    # equivalently (3/z^2)(sin(z)/z - cos(z)).  Near zero the subtraction
    # cancels catastrophically, so switch to the series 1 - z^2/10 + z^4/280
    # (next term z^6/15120 is below machine precision at the branch point).
    z = 1.2 * np.pi * np.abs(x)
    out = np.empty_like(z)
    small = z < 5e-3
    zs = z[small]
    out[small] = 1.0 - zs * zs / 10.0 + zs**4 / 280.0
    zl = z[~small]
    out[~small] = 3.0 / (zl * zl) * (np.sin(zl) / zl - np.cos(zl))
    return out


BARTLETT = KernelSpec(
    name=BARTLETT_NAME,
    evaluate=_bartlett,
    nondifferentiable_points=(1.0,),
    compact_support=True,
)
PARZEN = KernelSpec(
    name=PARZEN_NAME,
    evaluate=_parzen,
    nondifferentiable_points=(),
    compact_support=True,
)
QUADRATIC_SPECTRAL = KernelSpec(
    name=QS_NAME,
    evaluate=_quadratic_spectral,
    nondifferentiable_points=(),
    compact_support=False,
)

_REGISTRY: dict[str, KernelSpec] = {
    BARTLETT_NAME: BARTLETT,
    PARZEN_NAME: PARZEN,
    QS_NAME: QUADRATIC_SPECTRAL,
}


def kernel_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get_kernel(name: str) -> KernelSpec:
    """Look up a registered kernel by config name."""
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; registered kernels: {', '.join(kernel_names())}"
        ) from None


def toeplitz_weights(kernel: KernelSpec, m: int, bandwidth: float) -> np.ndarray:
    """The m x m Toeplitz matrix with entries kappa((i-j)/bandwidth).

    A zero bandwidth means "keep only lag zero": off-diagonal weights are 0
    and the result is the identity.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"matrix order must be >= 1, got {m}")
    bandwidth = float(bandwidth)
    if bandwidth < 0:
        raise ValueError(f"bandwidth must be >= 0, got {bandwidth}")
    if bandwidth == 0.0:
        return np.eye(m)
    vals = kernel.evaluate(np.arange(m) / bandwidth)
    idx = np.arange(m)
    return vals[np.abs(idx[:, None] - idx[None, :])]


def register_kernel(kernel: KernelSpec, *, trials: int = 100, seed: int = 0) -> KernelSpec:
    """Admit a custom kernel after checking the contract it must satisfy.

    The check draws random (order, bandwidth) pairs and requires every
    Toeplitz weight matrix to be positive definite up to roundoff
    (min eigenvalue > -1e-10 * order), plus evenness and kappa(0) = 1 on
    sampled points.  Raises ValueError when the kernel fails.
    """
    rng = np.random.default_rng(seed)
    at_zero = kernel_eval(kernel, 0.0)
    if not abs(at_zero - 1.0) <= 1e-12:
        raise ValueError(f"kernel {kernel.name!r} violates kappa(0) = 1 (got {at_zero})")
    xs = np.concatenate([rng.uniform(0, 5, 64), rng.uniform(0, 0.01, 16)])
    if not np.array_equal(kernel.evaluate(xs), kernel.evaluate(-xs)):
        raise ValueError(f"kernel {kernel.name!r} is not even")
    for _ in range(int(trials)):
        m = int(rng.integers(2, 51))
        bw = float(rng.uniform(0.01, 100.0))
        w = toeplitz_weights(kernel, m, bw)
        min_eig = float(np.linalg.eigvalsh(w)[0])
        if not min_eig > -1e-10 * m:
            raise ValueError(
                f"kernel {kernel.name!r} fails positive definiteness: Toeplitz "
                f"matrix of order {m} at bandwidth {bw:.4g} has min eigenvalue {min_eig:.3e}"
            )
    _REGISTRY[kernel.name] = kernel
    return kernel
