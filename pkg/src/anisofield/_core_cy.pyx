# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot kernels.

Same contract as `_core_np`; that module is the readable reference. Scalar
math lives in nogil helpers, array plumbing stays in Python-level code.
"""

from libc.math cimport exp, expm1, fabs, log, log1p

import numpy as np

cdef double _LN2 = 0.6931471805599453
cdef double _ASYMPTOTIC_CUT = 600.0


cdef inline double _fh(double h, double v) noexcept nogil:
    cdef double av = fabs(v)
    cdef double ln1me
    if av == 0.0:
        return 2.0
    if av > _ASYMPTOTIC_CUT:
        return exp(-h * av) + 2.0 * h * exp(-(1.0 - h) * av)
    if av < _LN2:
        ln1me = log(-expm1(-av))
    else:
        ln1me = log1p(-exp(-av))
    return exp(-h * av) + exp(h * av) * (-expm1(2.0 * h * ln1me))


cdef inline double _sgn(double x) noexcept nogil:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


cdef inline double _mod(double h1, double h2, double v1, double v2) noexcept nogil:
    cdef double f1 = _sgn(v1) * (-expm1(-2.0 * h1 * fabs(v1))) * 0.5
    cdef double f2 = _sgn(v2) * (-expm1(-2.0 * h2 * fabs(v2))) * 0.5
    return f1 * f2


def fh_values(double h, v):
    arr = np.asarray(v, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = np.empty_like(flat)
    cdef double[::1] fv = flat
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = fv.shape[0]
    with nogil:
        for i in range(n):
            ov[i] = _fh(h, fv[i])
    res = out.reshape(arr.shape)
    return res[()] if scalar else res


def modulation_values(double h1, double h2, v1, v2):
    b1, b2 = np.broadcast_arrays(
        np.asarray(v1, dtype=np.float64), np.asarray(v2, dtype=np.float64)
    )
    scalar = b1.ndim == 0
    f1 = np.ascontiguousarray(b1.reshape(-1))
    f2 = np.ascontiguousarray(b2.reshape(-1))
    out = np.empty_like(f1)
    cdef double[::1] x1 = f1
    cdef double[::1] x2 = f2
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = x1.shape[0]
    with nogil:
        for i in range(n):
            ov[i] = _mod(h1, h2, x1[i], x2[i])
    res = out.reshape(b1.shape)
    return res[()] if scalar else res


def rtheta_values(double h1, double h2, double theta, v1, v2):
    b1, b2 = np.broadcast_arrays(
        np.asarray(v1, dtype=np.float64), np.asarray(v2, dtype=np.float64)
    )
    scalar = b1.ndim == 0
    f1 = np.ascontiguousarray(b1.reshape(-1))
    f2 = np.ascontiguousarray(b2.reshape(-1))
    out = np.empty_like(f1)
    cdef double[::1] x1 = f1
    cdef double[::1] x2 = f2
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = x1.shape[0]
    cdef double val
    with nogil:
        for i in range(n):
            val = 0.25 * _fh(h1, x1[i]) * _fh(h2, x2[i])
            if theta != 0.0:
                val *= 1.0 + theta * _mod(h1, h2, x1[i], x2[i])
            ov[i] = val
    res = out.reshape(b1.shape)
    return res[()] if scalar else res


def rtheta_gram(double h1, double h2, double theta, u1, u2):
    a1 = np.ascontiguousarray(u1, dtype=np.float64)
    a2 = np.ascontiguousarray(u2, dtype=np.float64)
    cdef double[::1] x1 = a1
    cdef double[::1] x2 = a2
    cdef Py_ssize_t n = x1.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] G = out
    cdef Py_ssize_t i, j
    cdef double d1, d2, val
    # R_theta is even under joint sign flip, so the mirrored fill is exact.
    with nogil:
        for i in range(n):
            G[i, i] = 1.0
            for j in range(i):
                d1 = x1[i] - x1[j]
                d2 = x2[i] - x2[j]
                val = 0.25 * _fh(h1, d1) * _fh(h2, d2)
                if theta != 0.0:
                    val *= 1.0 + theta * _mod(h1, h2, d1, d2)
                G[i, j] = val
                G[j, i] = val
    return out


def series_partial(double h, double x, long n_terms, int kind):
    cdef double c = 2.0 * h
    cdef double x2 = x * x
    cdef double lead, g, nf
    cdef double term = 0.0
    cdef double s = 0.0
    cdef long n
    if kind == 0:
        lead = h / (h * h + x2)
    else:
        lead = 8.0 * x * h * h / ((h * h + x2) * (9.0 * h * h + x2))
    with nogil:
        for n in range(1, n_terms + 1):
            nf = <double> n
            if n > 1:
                c *= (2.0 * h - (nf - 1.0)) / nf
            if kind == 0:
                g = (nf - h) / ((nf - h) * (nf - h) + x2)
            else:
                g = 4.0 * x * nf * h / (((nf - h) * (nf - h) + x2) * ((nf + h) * (nf + h) + x2))
            term = c * g if n % 2 == 1 else -c * g
            s += term
    return lead + s, term
