"""Spectral machinery for the positive-definiteness of R_theta.

The 2-D spectral density of R_theta factorizes into 1-D transforms of the
scalar kernel: a(x) = int_0^inf F_H(v) cos(xv) dv and
b(x) = int_0^inf F_H(v)(1 - e^{-2Hv}) sin(xv) dv. Each is computed by three
independent routes (binomial series with an integral tail correction,
adaptive oscillatory quadrature with analytic exponential tails, and for a(x)
a gamma-function closed form), and the density
S(x, y) = a1(x) a2(y) - (theta/4) b1(x) b2(y) is nonnegative exactly when
a(x) > (sqrt|theta|/2) |b(x)| holds per coordinate. The admissible theta
bound, sandwich bounds, and Gram-matrix certificates live here too.

Conventions: plain angular frequency (no 2*pi factors); a is even and b is
odd, so signed x is accepted and folded by parity.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import integrate

from ._backend import core
from ._util import map_ordered
from .errors import (
    DomainError,
    NotCertifiedError,
    QuadratureFailure,
    SpecialFunctionError,
    ToleranceNotReached,
)
from .gammafn import log_abs_gamma_sq
from .kernels import HurstPair, KernelLike, StationaryKernel, kernel_values
from .reports import CheckRecord, VerificationReport

__all__ = [
    "SpectralPair",
    "ThetaCertificate",
    "BinomialSeries",
    "binom_coeffs",
    "a_series",
    "b_series",
    "a_quadrature",
    "b_quadrature",
    "a_closed_form",
    "gamma_modulus_ratio",
    "lower_bound_a",
    "upper_bound_b",
    "lower_bound_b",
    "integrability_bound",
    "theta_bound",
    "verify_main_inequality",
    "verify_psd_gram",
    "fourier_inversion_scan",
    "certificate_for",
]

SERIES_CAP = 10**6
_LN_PI = 1.1447298858494001741434273513530587


def _check_h(h: float) -> float:
    h = float(h)
    if not math.isfinite(h) or not 0.0 < h < 1.0:
        raise DomainError(f"h must lie in the open interval (0, 1), got {h!r}")
    return h


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SpectralPair:
    """The two 1-D transforms at one frequency: a > 0 always, b > 0 for x > 0."""

    a: float
    b: float
    x: float
    h: float


@dataclass(frozen=True)
class ThetaCertificate:
    """Admissibility certificate: |theta| <= theta_bound keeps R_theta PSD."""

    hurst: HurstPair
    theta_bound: float
    method: str  # closed_form_bound | gram_scan | fourier_scan
    tolerance: float
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BinomialSeries:
    """Signed coefficients binom(2h, n), n = 1..truncation, plus tail info.

    tail_constant is C in |binom(2h, n)| <= C n^{-(1+2h)} for n beyond the
    truncation (valid since |binom(2h, n)| n^{1+2h} is non-increasing there);
    tail_bound bounds the sum of all neglected |binom(2h, n)|.
    """

    h: float
    terms: np.ndarray
    truncation: int
    tail_constant: float
    tail_bound: float


def binom_coeffs(h: float, n_max: int) -> BinomialSeries:
    """Coefficients binom(2h, n) by the running product prod_k (2h - k + 1)/k."""
    h = _check_h(h)
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    n = np.arange(1, n_max + 1, dtype=np.float64)
    c = np.empty(n_max, dtype=np.float64)
    c[0] = 2.0 * h
    if n_max > 1:
        np.cumprod((2.0 * h - n[:-1]) / (n[:-1] + 1.0), out=c[1:])
        c[1:] *= 2.0 * h
    anchor = max(n_max, 2)
    last = abs(c[-1]) if n_max >= 2 else abs(c[0])
    tail_constant = last * anchor ** (1.0 + 2.0 * h)
    tail_bound = tail_constant * anchor ** (-2.0 * h) / (2.0 * h)
    return BinomialSeries(h, c, n_max, tail_constant, tail_bound)


# ---------------------------------------------------------------------------
# series route

def _tail_density(h: float, x: float, kind: int):
    """Smooth continuation t(u) of the absolute series term at real order u.

    For n >= 2 the terms share one sign and |binom(2h, n)| equals
    Gamma(2h+1) |sin(2 pi h)| Gamma(n - 2h) / (pi Gamma(n+1)).
    """
    pref = math.gamma(2.0 * h + 1.0) * abs(math.sin(2.0 * math.pi * h)) / math.pi
    x2 = x * x

    def t(u: float) -> float:
        if kind == 0:
            g = (u - h) / ((u - h) ** 2 + x2)
        else:
            g = 4.0 * x * u * h / (((u - h) ** 2 + x2) * ((u + h) ** 2 + x2))
        return pref * math.exp(math.lgamma(u - 2.0 * h) - math.lgamma(u + 1.0)) * g

    return t


def _series_eval(h: float, x: float, tol: float, kind: int) -> tuple[float, int, float]:
    """Partial sum plus midpoint-rule tail correction; returns (value, n, err_bound)."""
    n_terms = max(2000, int(3.0 * x) + 1000)
    while True:
        if n_terms > SERIES_CAP:
            raise ToleranceNotReached(
                f"series for h={h}, x={x} needs more than {SERIES_CAP} terms for tol={tol}"
            )
        partial, last = core.series_partial(h, x, n_terms, kind)
        if last == 0.0:
            # coefficients vanished identically (2h integer): the sum is exact
            return partial, n_terms, 0.0
        t = _tail_density(h, x, kind)
        with warnings.catch_warnings():
            # slow-convergence warnings are fine: quad_err enters the budget below
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            tail, quad_err = integrate.quad(
                t, n_terms + 0.5, np.inf, epsabs=1e-15, epsrel=1e-11, limit=200
            )
        # midpoint Euler-Maclaurin residual ~ |t'(N + 1/2)|/24, taken with slack
        residual = abs(t(n_terms + 1.5) - t(n_terms + 0.5)) / 24.0
        err = 4.0 * (quad_err + residual)
        value = partial + math.copysign(tail, last)
        if err < tol:
            return value, n_terms, err
        n_terms *= 4


def a_series(h: float, x: float, tol: float = 1e-10) -> float:
    """Cosine transform of F_H by the binomial series route."""
    h = _check_h(h)
    if tol < 0.0:
        raise DomainError("tol must be nonnegative")
    value, _, _ = _series_eval(h, abs(float(x)), tol, 0)
    return value


def b_series(h: float, x: float, tol: float = 1e-10) -> float:
    """Sine transform of F_H (1 - e^{-2Hv}) by the binomial series route."""
    h = _check_h(h)
    if tol < 0.0:
        raise DomainError("tol must be nonnegative")
    x = float(x)
    if x == 0.0:
        return 0.0
    value, _, _ = _series_eval(h, abs(x), tol, 1)
    return math.copysign(value, x)


# ---------------------------------------------------------------------------
# quadrature route

def _quad_checked(fn, lo, hi, tol, **kw):
    out = integrate.quad(fn, lo, hi, epsabs=tol, epsrel=1e-12, limit=400, full_output=1, **kw)
    if len(out) > 3:
        raise QuadratureFailure(f"adaptive quadrature did not converge: {out[3]}")
    return out[0]


def _cutoff(h: float, tol: float) -> float:
    # F_H(v) ~ e^{-hv} + 2h e^{-(1-h)v}: past V both factors are below tol
    return math.log(1.0 / tol) / min(h, 1.0 - h) + 10.0


def a_quadrature(h: float, x: float, tol: float = 1e-10) -> float:
    """Cosine transform of F_H by adaptive quadrature plus analytic tails."""
    h = _check_h(h)
    if not 0.0 < tol < 1.0:
        raise DomainError("tol must lie in (0, 1)")
    x = abs(float(x))
    V = _cutoff(h, tol)
    fv = lambda v: float(core.fh_values(h, v))
    if x == 0.0:
        val = _quad_checked(fv, 0.0, V, tol * 0.25)
    else:
        val = _quad_checked(fv, 0.0, V, tol * 0.25, weight="cos", wvar=x)
    for alpha, coef in ((h, 1.0), (1.0 - h, 2.0 * h)):
        val += (
            coef
            * math.exp(-alpha * V)
            * (alpha * math.cos(x * V) - x * math.sin(x * V))
            / (alpha * alpha + x * x)
        )
    return val


def b_quadrature(h: float, x: float, tol: float = 1e-10) -> float:
    """Sine transform of F_H (1 - e^{-2Hv}) by adaptive quadrature plus tails."""
    h = _check_h(h)
    if not 0.0 < tol < 1.0:
        raise DomainError("tol must lie in (0, 1)")
    x = float(x)
    if x == 0.0:
        return 0.0
    ax = abs(x)
    V = _cutoff(h, tol)
    fv = lambda v: float(core.fh_values(h, v)) * (-math.expm1(-2.0 * h * v))
    val = _quad_checked(fv, 0.0, V, tol * 0.25, weight="sin", wvar=ax)
    # integrand tail: (e^{-hv} + 2h e^{-(1-h)v})(1 - e^{-2hv}) up to O(e^{-(2-h)v})
    for alpha, coef in ((h, 1.0), (1.0 - h, 2.0 * h), (3.0 * h, -1.0), (1.0 + h, -2.0 * h)):
        val += (
            coef
            * math.exp(-alpha * V)
            * (alpha * math.sin(ax * V) + ax * math.cos(ax * V))
            / (alpha * alpha + ax * ax)
        )
    return math.copysign(val, x)


# ---------------------------------------------------------------------------
# closed form and gamma helpers

def _ln_cosh(y: float) -> float:
    y = abs(y)
    return y - math.log(2.0) + math.log1p(math.exp(-2.0 * y))


def a_closed_form(h: float, x: float) -> float:
    """a(x) = pi Gamma(1+2H) sin(pi H) cosh(pi x) /
    [(H^2 + x^2) |Gamma(H + ix)|^2 (cosh^2(pi x) - cos^2(pi H))], in log space."""
    h = _check_h(h)
    x = abs(float(x))
    lc = _ln_cosh(math.pi * x)
    cos2 = math.cos(math.pi * h) ** 2
    ln_num = _LN_PI + math.lgamma(1.0 + 2.0 * h) + math.log(math.sin(math.pi * h)) + lc
    ln_den = (
        math.log(h * h + x * x)
        + log_abs_gamma_sq(h, x)
        + 2.0 * lc
        + math.log1p(-cos2 * math.exp(-2.0 * lc))
    )
    val = math.exp(ln_num - ln_den)
    if not math.isfinite(val):
        raise SpecialFunctionError(f"closed form overflowed at h={h}, x={x}")
    return val


def gamma_modulus_ratio(h: float, x: float) -> float:
    """Gamma(h)^2 / |Gamma(h + ix)|^2 = prod_n (1 + x^2/(n+h)^2); >= sinh(pi x)/(pi x)."""
    h = _check_h(h)
    x = abs(float(x))
    if x == 0.0:
        return 1.0
    val = math.exp(2.0 * math.lgamma(h) - log_abs_gamma_sq(h, x))
    if not math.isfinite(val):
        raise SpecialFunctionError(f"gamma ratio overflowed at h={h}, x={x}")
    return val


# ---------------------------------------------------------------------------
# analytic sandwich bounds

def lower_bound_a(h: float, x: float) -> float:
    """Lower bound on a(x): Gamma(1+2H) sin(pi H) tanh(pi H) / (2 Gamma(H)^2 (H^2+x^2) d),
    with d = x for x >= H and d = H on 0 <= x < H."""
    h = _check_h(h)
    x = abs(float(x))
    pref = (
        math.exp(math.lgamma(1.0 + 2.0 * h) - 2.0 * math.lgamma(h))
        * math.sin(math.pi * h)
        * math.tanh(math.pi * h)
        / 2.0
    )
    return pref / ((h * h + x * x) * (x if x >= h else h))


def upper_bound_b(h: float, x: float) -> float:
    """Upper bound on b(x), valid for H in (1/2, 1) only: 16 H^2 / ((H^2+x^2) x)
    for x >= H, 4 H / ((1-H)(H^2+x^2)) on 0 <= x < H.

    The derivation keeps only the first two series components, which requires
    2H - 1 > 0; for H <= 1/2 the bound fails (b(0.25, 2.8) already exceeds it).
    """
    h = _check_h(h)
    if h <= 0.5:
        raise DomainError(f"upper_bound_b requires h in (1/2, 1), got {h}")
    x = abs(float(x))
    if x >= h:
        return 16.0 * h * h / ((h * h + x * x) * x)
    return 4.0 * h / ((1.0 - h) * (h * h + x * x))


def lower_bound_b(h: float, x: float) -> float:
    """Strict lower bound on b(x) for x > 0: 8 x H^2 / ((H^2+x^2)(9H^2+x^2))."""
    h = _check_h(h)
    x = float(x)
    return 8.0 * x * h * h / ((h * h + x * x) * (9.0 * h * h + x * x))


def integrability_bound(h: float) -> float:
    """Bound on the full-line integral of F_H: 2/H + 2(3-H)/((1-H)(2-H))."""
    h = _check_h(h)
    return 2.0 / h + 2.0 * (3.0 - h) / ((1.0 - h) * (2.0 - h))


# ---------------------------------------------------------------------------
# theta bound and certificates

def _sqrt_theta_bound(h: float) -> float:
    return (
        math.exp(math.lgamma(2.0 * h) - 2.0 * math.lgamma(h))
        * (1.0 - h)
        / (4.0 * h)
        * math.sin(math.pi * h)
        * math.tanh(math.pi * h)
    )


def theta_bound(hurst: HurstPair) -> ThetaCertificate:
    """Max admissible |theta|: the per-coordinate sqrt-level bound
    (Gamma(2H)/Gamma(H)^2) ((1-H)/(4H)) sin(pi H) tanh(pi H), minimized over
    the two coordinates and squared."""
    b1 = _sqrt_theta_bound(hurst.h1)
    b2 = _sqrt_theta_bound(hurst.h2)
    bound = min(b1, b2) ** 2
    return ThetaCertificate(
        hurst=hurst,
        theta_bound=bound,
        method="closed_form_bound",
        tolerance=1e-13,
        evidence={"sqrt_bound_h1": b1, "sqrt_bound_h2": b2},
    )


def _default_x_grid() -> np.ndarray:
    return np.geomspace(1e-3, 50.0, 200)


def verify_main_inequality(
    hurst: HurstPair,
    theta: float,
    x_grid: Optional[np.ndarray] = None,
    tol: float = 1e-10,
) -> VerificationReport:
    """Check a(x) > (sqrt|theta|/2) |b(x)| on the grid, per coordinate."""
    start = time.perf_counter()
    xs = _default_x_grid() if x_grid is None else np.asarray(x_grid, dtype=np.float64)
    half_sqrt = 0.5 * math.sqrt(abs(theta))
    checks = []
    for label, h in (("h1", hurst.h1), ("h2", hurst.h2)):
        margins = map_ordered(
            lambda x: a_series(h, x, tol) - half_sqrt * abs(b_series(h, x, tol)), xs
        )
        idx = int(np.argmin(margins))
        checks.append(
            CheckRecord(
                name=f"main_inequality_{label}",
                passed=margins[idx] > 0.0,
                statistic=float(margins[idx]),
                threshold=0.0,
                inputs={"h": h, "theta": theta, "x_at_min": float(xs[idx]), "x_count": len(xs)},
            )
        )
    config = {
        "hurst": {"h1": hurst.h1, "h2": hurst.h2},
        "theta": theta,
        "tol": tol,
        "x_grid": {"min": float(xs.min()), "max": float(xs.max()), "count": int(xs.size)},
    }
    return VerificationReport(config, checks, time.perf_counter() - start)


def verify_psd_gram(
    kernel: KernelLike,
    points,
    jitter_tol: float = 1e-8,
    hurst: Optional[HurstPair] = None,
) -> VerificationReport:
    """Eigenvalue certificate: min eig of G[i,j] = R(p_i - p_j) >= -jitter_tol * max eig."""
    start = time.perf_counter()
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("points must be an (n, 2) array of plane points")
    n = pts.shape[0]
    if not 2 <= n <= 2048:
        raise DomainError(f"need between 2 and 2048 points, got {n}")
    if np.unique(pts, axis=0).shape[0] != n:
        raise DomainError("points must be distinct")

    if isinstance(kernel, StationaryKernel):
        gram = core.rtheta_gram(
            kernel.hurst.h1, kernel.hurst.h2, kernel.theta, pts[:, 0], pts[:, 1]
        )
        descriptor = kernel.descriptor()
    else:
        d1 = pts[:, 0][:, None] - pts[:, 0][None, :]
        d2 = pts[:, 1][:, None] - pts[:, 1][None, :]
        gram = kernel_values(kernel, d1, d2)
        descriptor = {"kernel": "custom"}

    checks = []
    scale = float(np.max(np.abs(gram)))
    asym = float(np.max(np.abs(gram - gram.T)))
    checks.append(
        CheckRecord(
            name="gram_symmetry",
            passed=asym <= 1e-12 * max(scale, 1.0),
            statistic=asym,
            threshold=1e-12 * max(scale, 1.0),
            inputs={"n_points": n},
        )
    )
    try:
        eigvals = np.linalg.eigvalsh(0.5 * (gram + gram.T))
        lam_min, lam_max = float(eigvals[0]), float(eigvals[-1])
        checks.append(
            CheckRecord(
                name="gram_min_eigenvalue",
                passed=lam_min >= -jitter_tol * abs(lam_max),
                statistic=lam_min,
                threshold=-jitter_tol * abs(lam_max),
                inputs={"n_points": n, "lambda_max": lam_max},
            )
        )
    except np.linalg.LinAlgError as exc:
        checks.append(
            CheckRecord(
                name="gram_min_eigenvalue",
                passed=False,
                inputs={"n_points": n, "error": f"eigensolver failed: {exc}"},
            )
        )
    config = {"kernel": descriptor, "jitter_tol": jitter_tol, "n_points": n}
    return VerificationReport(config, checks, time.perf_counter() - start)


def fourier_inversion_scan(
    kernel: StationaryKernel,
    xy_grid: Optional[tuple] = None,
    tol: float = 1e-10,
) -> VerificationReport:
    """Scan the factorized spectral density
    S(x, y) = a1(x) a2(y) - (theta/4) b1(x) b2(y) over the frequency grid and
    its y-mirror; also record the absolute-integrability precheck."""
    if not isinstance(kernel, StationaryKernel):
        raise DomainError("fourier_inversion_scan needs a StationaryKernel")
    start = time.perf_counter()
    if xy_grid is None:
        xs = ys = np.geomspace(1e-3, 30.0, 50)
    else:
        xs = np.asarray(xy_grid[0], dtype=np.float64)
        ys = np.asarray(xy_grid[1], dtype=np.float64)
    h1, h2 = kernel.hurst.h1, kernel.hurst.h2
    theta = kernel.theta

    a1 = np.array(map_ordered(lambda x: a_closed_form(h1, x), xs))
    a2 = np.array(map_ordered(lambda y: a_closed_form(h2, y), ys))
    b1 = np.array(map_ordered(lambda x: b_series(h1, x, tol), xs))
    b2 = np.array(map_ordered(lambda y: b_series(h2, y, tol), ys))

    checks = []
    for name, sign in (("density_nonnegative", 1.0), ("density_nonnegative_mirrored", -1.0)):
        dens = np.outer(a1, a2) - sign * (theta / 4.0) * np.outer(b1, b2)
        i, j = np.unravel_index(np.argmin(dens), dens.shape)
        checks.append(
            CheckRecord(
                name=name,
                passed=float(dens[i, j]) >= -tol,
                statistic=float(dens[i, j]),
                threshold=-tol,
                inputs={"x": float(xs[i]), "y": float(ys[j] * sign)},
            )
        )

    a10 = a_quadrature(h1, 0.0, tol)
    a20 = a_quadrature(h2, 0.0, tol)
    factor = 1.0 + abs(theta) / 4.0
    checks.append(
        CheckRecord(
            name="absolute_integrability",
            passed=factor * a10 * a20
            <= factor * 0.25 * integrability_bound(h1) * integrability_bound(h2),
            statistic=factor * a10 * a20,
            threshold=factor * 0.25 * integrability_bound(h1) * integrability_bound(h2),
            inputs={"marginal_h1": 2.0 * a10, "marginal_h2": 2.0 * a20},
        )
    )
    config = {
        "kernel": kernel.descriptor(),
        "tol": tol,
        "grid": {
            "x": {"min": float(xs.min()), "max": float(xs.max()), "count": int(xs.size)},
            "y": {"min": float(ys.min()), "max": float(ys.max()), "count": int(ys.size)},
        },
    }
    return VerificationReport(config, checks, time.perf_counter() - start)


def certificate_for(
    kernel: KernelLike,
    points=None,
    jitter_tol: float = 1e-8,
) -> Union[ThetaCertificate, VerificationReport]:
    """Cheapest certificate that admits the kernel for sampling.

    A StationaryKernel inside the analytic theta bound gets the closed-form
    certificate; anything else falls back to a Gram scan over `points` (the
    caller supplies the grid it intends to sample). Raises NotCertifiedError
    when no route passes.
    """
    if isinstance(kernel, StationaryKernel):
        cert = theta_bound(kernel.hurst)
        if abs(kernel.theta) <= cert.theta_bound:
            return cert
    if points is not None:
        report = verify_psd_gram(kernel, points, jitter_tol)
        if report.passed:
            return report
        raise NotCertifiedError(
            "kernel failed the Gram positive-semidefiniteness scan on the requested points"
        )
    raise NotCertifiedError(
        "kernel has no analytic theta bound certificate; supply points for a Gram scan"
    )
