"""Scalar kernel F_H, the product kernels R_0 and R_theta, and the fBs covariance.

F_H(v) = 2 cosh(H v) - |2 sinh(v/2)|^(2H) is the stationary covariance trace of
fractional Brownian motion after the Lamperti time change. R_0 is the product
of two such factors (normalized to 1 at the origin); R_theta multiplies R_0 by
1 + theta * m(v) with the odd-odd modulation
m(v) = e^{-H1|v1| - H2|v2|} sinh(H1 v1) sinh(H2 v2), |m| <= 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ._backend import core
from .errors import DomainError

__all__ = [
    "HurstPair",
    "StationaryKernel",
    "KernelLike",
    "f_h",
    "modulation",
    "r0",
    "r_theta",
    "kernel_values",
    "fbs_covariance",
]


def _check_h(h: float, name: str = "h") -> float:
    h = float(h)
    if not math.isfinite(h) or not 0.0 < h < 1.0:
        raise DomainError(f"{name} must lie in the open interval (0, 1), got {h!r}")
    return h


@dataclass(frozen=True)
class HurstPair:
    """Hurst indices (h1, h2), each in the open interval (0, 1)."""

    h1: float
    h2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "h1", _check_h(self.h1, "h1"))
        object.__setattr__(self, "h2", _check_h(self.h2, "h2"))

    def swapped(self) -> "HurstPair":
        return HurstPair(self.h2, self.h1)


@dataclass(frozen=True)
class StationaryKernel:
    """Kernel descriptor: theta = 0 selects R_0, any other value selects R_theta.

    theta is unrestricted here; positive-definiteness is a separate certificate
    (see `spectral.theta_bound` and `spectral.verify_psd_gram`) that the sampler
    demands before factorizing.
    """

    hurst: HurstPair
    theta: float = 0.0

    def __post_init__(self) -> None:
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise DomainError(f"theta must be finite, got {theta!r}")
        object.__setattr__(self, "theta", theta)

    def descriptor(self) -> dict:
        return {"h1": self.hurst.h1, "h2": self.hurst.h2, "theta": self.theta}


KernelLike = Union[StationaryKernel, Callable[[float, float], float]]


def _scalarize(value, *inputs):
    if all(np.ndim(arg) == 0 for arg in inputs):
        return float(value)
    return value


def f_h(h: float, v):
    """Evaluate F_H(v). Accepts scalar or array `v`; even in v, F_H(0) = 2."""
    h = _check_h(h)
    return _scalarize(core.fh_values(h, v), v)


def modulation(hurst: HurstPair, v):
    """The odd-odd factor m(v); vanishes on the axes, |m| <= 1/4 everywhere."""
    v1, v2 = v
    return _scalarize(core.modulation_values(hurst.h1, hurst.h2, v1, v2), v1, v2)


def r0(hurst: HurstPair, v):
    """R_0(v) = (1/4) F_{h1}(v1) F_{h2}(v2) for the lag pair v = (v1, v2)."""
    v1, v2 = v
    return _scalarize(core.rtheta_values(hurst.h1, hurst.h2, 0.0, v1, v2), v1, v2)


def r_theta(kernel: StationaryKernel, v):
    """R_theta(v) for the lag pair v = (v1, v2); equals r0 when theta = 0."""
    v1, v2 = v
    h = kernel.hurst
    return _scalarize(core.rtheta_values(h.h1, h.h2, kernel.theta, v1, v2), v1, v2)


def kernel_values(kernel: KernelLike, v1, v2):
    """Evaluate a kernel descriptor or a plain callable R(v1, v2) on lag arrays."""
    if isinstance(kernel, StationaryKernel):
        h = kernel.hurst
        return core.rtheta_values(h.h1, h.h2, kernel.theta, v1, v2)
    return np.vectorize(kernel, otypes=[np.float64])(v1, v2)


def fbs_covariance(hurst: HurstPair, t, s):
    """Fractional Brownian sheet covariance.

    2^{-2} * prod_i (|t_i|^{2H_i} + |s_i|^{2H_i} - |t_i - s_i|^{2H_i}), for
    t, s in the closed quarter-plane. Vanishes whenever a coordinate is 0.
    """
    t1, t2 = (np.asarray(c, dtype=np.float64) for c in t)
    s1, s2 = (np.asarray(c, dtype=np.float64) for c in s)
    for arr in (t1, t2, s1, s2):
        if np.any(arr < 0.0):
            raise DomainError("fbs_covariance requires nonnegative coordinates")
    e1, e2 = 2.0 * hurst.h1, 2.0 * hurst.h2
    # Route every power through the array ufunc: mixing numpy's scalar pow with
    # the ufunc loop can differ by one ulp and spoil the exact cancellation that
    # makes the covariance vanish on the axes.
    d1 = np.asarray(np.abs(t1 - s1), dtype=np.float64)
    d2 = np.asarray(np.abs(t2 - s2), dtype=np.float64)
    c1 = 0.5 * (t1**e1 + s1**e1 - d1**e1)
    c2 = 0.5 * (t2**e2 + s2**e2 - d2**e2)
    return _scalarize(c1 * c2, t1, t2, s1, s2)
