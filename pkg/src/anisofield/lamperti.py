"""Bridge between stationary kernels and self-similar field covariances.

A stationary kernel R on R^2 lifts to the covariance of a self-similar field
X(t) = t1^{H1} t2^{H2} Y(ln t1, ln t2) via
C(t, s) = t1^{H1} s1^{H1} t2^{H2} s2^{H2} R(ln(t1/s1), ln(t2/s2)).
The check_* operations express the covariance identities that characterize
fields with stationary rectangular increments; they return residuals, and
thresholding is left to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .kernels import HurstPair, KernelLike, StationaryKernel, fbs_covariance, kernel_values, r0

__all__ = [
    "FieldCovariance",
    "RectIncrement",
    "field_cov",
    "increment_covariance",
    "check_lemma1",
    "check_lemma2",
    "check_lemma3",
    "check_r1",
]


@dataclass(frozen=True)
class FieldCovariance:
    """Field-side covariance built from a stationary kernel.

    `kernel` is either a `StationaryKernel` or a plain callable R(v1, v2);
    callables must come with an explicit HurstPair for the Lamperti prefactor.
    """

    kernel: KernelLike
    hurst: Optional[HurstPair] = None

    def __post_init__(self) -> None:
        if self.hurst is None:
            if not isinstance(self.kernel, StationaryKernel):
                raise DomainError("a callable kernel requires an explicit HurstPair")
            object.__setattr__(self, "hurst", self.kernel.hurst)

    @property
    def theta(self) -> Optional[float]:
        if isinstance(self.kernel, StationaryKernel):
            return self.kernel.theta
        return None

    def descriptor(self) -> dict:
        if isinstance(self.kernel, StationaryKernel):
            return self.kernel.descriptor()
        return {"h1": self.hurst.h1, "h2": self.hurst.h2, "kernel": "custom"}


@dataclass(frozen=True)
class RectIncrement:
    """Rectangle [u1, v1] x [u2, v2] with u in the closed quarter-plane, v > u."""

    u: tuple[float, float]
    v: tuple[float, float]

    def __post_init__(self) -> None:
        u = (float(self.u[0]), float(self.u[1]))
        v = (float(self.v[0]), float(self.v[1]))
        if min(u) < 0.0:
            raise DomainError(f"lower corner must be in the closed quarter-plane, got {u}")
        if not (v[0] > u[0] and v[1] > u[1]):
            raise DomainError(f"upper corner must exceed lower corner, got u={u}, v={v}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def sides(self) -> tuple[float, float]:
        return (self.v[0] - self.u[0], self.v[1] - self.u[1])

    def corners(self) -> tuple[tuple[tuple[float, float], float], ...]:
        """The four corners with the signs of the alternating increment sum."""
        (u1, u2), (v1, v2) = self.u, self.v
        return (((v1, v2), 1.0), ((u1, v2), -1.0), ((v1, u2), -1.0), ((u1, u2), 1.0))


def field_cov(fc: FieldCovariance, t, s):
    """C(t, s) for points in the closed quarter-plane; exactly 0 on the axes."""
    t1, t2 = (np.asarray(c, dtype=np.float64) for c in t)
    s1, s2 = (np.asarray(c, dtype=np.float64) for c in s)
    for arr in (t1, t2, s1, s2):
        if np.any(arr < 0.0):
            raise DomainError("field_cov requires nonnegative coordinates")
    scalar = all(a.ndim == 0 for a in (t1, t2, s1, s2))

    pos = (t1 > 0.0) & (t2 > 0.0) & (s1 > 0.0) & (s2 > 0.0)
    t1, t2, s1, s2, pos = np.broadcast_arrays(t1, t2, s1, s2, pos)
    out = np.zeros(pos.shape, dtype=np.float64)
    if np.any(pos):
        h1, h2 = fc.hurst.h1, fc.hurst.h2
        lt1, lt2 = np.log(t1[pos]), np.log(t2[pos])
        ls1, ls2 = np.log(s1[pos]), np.log(s2[pos])
        pref = np.exp(h1 * (lt1 + ls1) + h2 * (lt2 + ls2))
        out[pos] = pref * kernel_values(fc.kernel, lt1 - ls1, lt2 - ls2)
    return float(out[()]) if scalar else out


def increment_covariance(fc: FieldCovariance, a: RectIncrement, b: RectIncrement) -> float:
    """E[Delta_a X * Delta_b X] expanded into the 16 corner covariances."""
    total = 0.0
    for pa, sa in a.corners():
        for pb, sb in b.corners():
            total += sa * sb * field_cov(fc, pa, pb)
    return total


def _open_quarter(label: str, *points) -> None:
    for p in points:
        if min(p) <= 0.0:
            raise DomainError(f"{label} requires strictly positive coordinates, got {p}")


def check_lemma1(fc: FieldCovariance, t, s) -> tuple[float, float]:
    """Residuals of the squared-increment identities along each coordinate.

    E[X(t) - X(s1, t2)]^2 = |t1 - s1|^{2H1} t2^{2H2} and
    E[X(s1, t2) - X(s1, s2)]^2 = |t2 - s2|^{2H2} s1^{2H1}.
    """
    _open_quarter("check_lemma1", t, s)
    (t1, t2), (s1, s2) = t, s
    h1, h2 = fc.hurst.h1, fc.hurst.h2
    mid = (s1, t2)
    lhs1 = field_cov(fc, t, t) - 2.0 * field_cov(fc, t, mid) + field_cov(fc, mid, mid)
    rhs1 = abs(t1 - s1) ** (2.0 * h1) * t2 ** (2.0 * h2)
    lhs2 = field_cov(fc, mid, mid) - 2.0 * field_cov(fc, mid, s) + field_cov(fc, s, s)
    rhs2 = abs(t2 - s2) ** (2.0 * h2) * s1 ** (2.0 * h1)
    return (abs(lhs1 - rhs1), abs(lhs2 - rhs2))


def check_lemma2(fc: FieldCovariance, t, s) -> tuple[float, float]:
    """Residuals of the mixed-product identities through the corner (s1, t2).

    E[X(t) X(s1, t2)] = (1/2) t2^{2H2} (t1^{2H1} + s1^{2H1} - |t1 - s1|^{2H1}) and
    E[X(s1, t2) X(s)] = (1/2) s1^{2H1} (t2^{2H2} + s2^{2H2} - |t2 - s2|^{2H2}).
    """
    _open_quarter("check_lemma2", t, s)
    (t1, t2), (s1, s2) = t, s
    h1, h2 = fc.hurst.h1, fc.hurst.h2
    mid = (s1, t2)
    lhs1 = field_cov(fc, t, mid)
    rhs1 = 0.5 * t2 ** (2.0 * h2) * (
        t1 ** (2.0 * h1) + s1 ** (2.0 * h1) - abs(t1 - s1) ** (2.0 * h1)
    )
    lhs2 = field_cov(fc, mid, s)
    rhs2 = 0.5 * s1 ** (2.0 * h1) * (
        t2 ** (2.0 * h2) + s2 ** (2.0 * h2) - abs(t2 - s2) ** (2.0 * h2)
    )
    return (abs(lhs1 - rhs1), abs(lhs2 - rhs2))


def check_lemma3(fc: FieldCovariance, t, s) -> float:
    """Residual of the folded two-point identity.

    E[X(t) X(s)] + E[X(t1, s2) X(s1, t2)] equals twice the fBs covariance.
    """
    _open_quarter("check_lemma3", t, s)
    (t1, t2), (s1, s2) = t, s
    lhs = field_cov(fc, t, s) + field_cov(fc, (t1, s2), (s1, t2))
    rhs = 2.0 * fbs_covariance(fc.hurst, t, s)
    return abs(lhs - rhs)


def check_r1(kernel: KernelLike, v, hurst: Optional[HurstPair] = None) -> float:
    """Residual of R(v1, v2) + R(v1, -v2) = (1/2) F_{H1}(v1) F_{H2}(v2)."""
    if hurst is None:
        if not isinstance(kernel, StationaryKernel):
            raise DomainError("a callable kernel requires an explicit HurstPair")
        hurst = kernel.hurst
    v1, v2 = float(v[0]), float(v[1])
    folded = float(kernel_values(kernel, v1, v2)) + float(kernel_values(kernel, v1, -v2))
    return abs(folded - 2.0 * r0(hurst, (v1, v2)))
