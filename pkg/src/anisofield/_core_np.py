"""NumPy implementation of the hot kernels.

Mirrors the API of the compiled module `_core_cy`; `_backend` picks one at
import time. Everything here is pure and allocation-bounded (gram assembly
works in row blocks so peak memory stays O(block * n)).
"""

from __future__ import annotations

import numpy as np

_LN2 = 0.6931471805599453
# F_H switches to its two-term asymptotic expansion once exp(h*|v|) would
# overflow; the neglected remainder is O(exp(-(2-h)|v|)), far below 1 ulp there.
_ASYMPTOTIC_CUT = 600.0
_GRAM_BLOCK = 256


def fh_values(h: float, v: np.ndarray) -> np.ndarray:
    """F_H(v) = 2 cosh(h v) - |2 sinh(v/2)|^(2h), in cancellation-free form."""
    av = np.abs(np.asarray(v, dtype=np.float64))
    scalar = av.ndim == 0
    av = np.atleast_1d(av)
    out = np.empty_like(av)

    zero = av == 0.0
    small = (av > 0.0) & (av < _LN2)
    mid = (av >= _LN2) & (av <= _ASYMPTOTIC_CUT)
    large = av > _ASYMPTOTIC_CUT

    out[zero] = 2.0
    s = av[small]
    out[small] = np.exp(-h * s) + np.exp(h * s) * (
        -np.expm1(2.0 * h * np.log(-np.expm1(-s)))
    )
    m = av[mid]
    out[mid] = np.exp(-h * m) + np.exp(h * m) * (
        -np.expm1(2.0 * h * np.log1p(-np.exp(-m)))
    )
    l = av[large]
    out[large] = np.exp(-h * l) + 2.0 * h * np.exp(-(1.0 - h) * l)
    return out[0] if scalar else out


def modulation_values(h1: float, h2: float, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """m(v) = e^{-h1|v1|-h2|v2|} sinh(h1 v1) sinh(h2 v2), via the bounded product form."""
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    f1 = np.sign(v1) * (-np.expm1(-2.0 * h1 * np.abs(v1))) * 0.5
    f2 = np.sign(v2) * (-np.expm1(-2.0 * h2 * np.abs(v2))) * 0.5
    return f1 * f2


def rtheta_values(
    h1: float, h2: float, theta: float, v1: np.ndarray, v2: np.ndarray
) -> np.ndarray:
    """R_theta(v) = (1/4) F_{h1}(v1) F_{h2}(v2) (1 + theta * m(v))."""
    base = 0.25 * fh_values(h1, v1) * fh_values(h2, v2)
    if theta == 0.0:
        return base
    return base * (1.0 + theta * modulation_values(h1, h2, v1, v2))


def rtheta_gram(
    h1: float, h2: float, theta: float, u1: np.ndarray, u2: np.ndarray
) -> np.ndarray:
    """Gram matrix G[i, j] = R_theta(u1[i] - u1[j], u2[i] - u2[j])."""
    u1 = np.asarray(u1, dtype=np.float64)
    u2 = np.asarray(u2, dtype=np.float64)
    n = u1.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    for lo in range(0, n, _GRAM_BLOCK):
        hi = min(lo + _GRAM_BLOCK, n)
        d1 = u1[lo:hi, None] - u1[None, :]
        d2 = u2[lo:hi, None] - u2[None, :]
        out[lo:hi, :] = rtheta_values(h1, h2, theta, d1, d2)
    return out


def series_partial(h: float, x: float, n_terms: int, kind: int) -> tuple[float, float]:
    """Leading term plus the first `n_terms` series terms of a(x) (kind 0) or b(x) (kind 1).

    Series coefficients follow the signed recurrence c_1 = 2h,
    c_{n+1} = c_n (2h - n)/(n + 1); the summand is -(-1)^n c_n g(n).
    Returns (partial_sum, last_term).
    """
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    c = np.empty(n_terms, dtype=np.float64)
    c[0] = 2.0 * h
    if n_terms > 1:
        np.cumprod((2.0 * h - n[:-1]) / (n[:-1] + 1.0), out=c[1:])
        c[1:] *= 2.0 * h
    x2 = x * x
    if kind == 0:
        g = (n - h) / ((n - h) ** 2 + x2)
        lead = h / (h * h + x2)
    else:
        g = 4.0 * x * n * h / (((n - h) ** 2 + x2) * ((n + h) ** 2 + x2))
        lead = 8.0 * x * h * h / ((h * h + x2) * (9.0 * h * h + x2))
    sign = np.where(n.astype(np.int64) % 2 == 0, -1.0, 1.0)
    terms = sign * c * g
    return lead + float(np.sum(terms)), float(terms[-1])
