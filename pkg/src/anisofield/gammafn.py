"""Complex log-gamma via a Lanczos approximation.

The closed-form cosine transform needs log |Gamma(H + ix)| for H in (0, 1) and
real x, a strip where the g = 7, n = 9 Lanczos fit is accurate to ~1e-14
relative after reflection. Validated in the test suite against the identities
|Gamma(1/2 + ix)|^2 = pi / cosh(pi x) and Gamma(1 + z) = z Gamma(z), and
against an independent library implementation.
"""

from __future__ import annotations

import cmath
import math

from .errors import SpecialFunctionError

__all__ = ["loggamma_complex", "log_abs_gamma_sq"]

_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LN_SQRT_2PI = 0.9189385332046727417803297364056176
_LN_PI = 1.1447298858494001741434273513530587


def _log_sin(z: complex) -> complex:
    # sin(u + iv) ~ (e^{|v|}/2) e^{i sign(v) (pi/2 - u)} once e^{-2|v|} is negligible
    u, v = z.real, z.imag
    if abs(v) > 20.0:
        return complex(abs(v) - math.log(2.0), math.copysign(1.0, v) * (0.5 * math.pi - u))
    return cmath.log(cmath.sin(z))


def _lanczos_sum(zm1: complex) -> complex:
    s = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        s += _LANCZOS_C[k] / (zm1 + k)
    return s


def loggamma_complex(z: complex) -> complex:
    """A logarithm of Gamma(z) for z off the nonpositive real axis.

    The real part is log |Gamma(z)| (the only part consumed downstream). The
    imaginary part is an argument of Gamma(z): in the reflection region
    Re(z) < 1/2 it can differ from the continuous branch by a multiple of 2 pi.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise SpecialFunctionError(f"log-gamma pole at z = {z}")
    if z.real < 0.5:
        result = _LN_PI - _log_sin(math.pi * z) - loggamma_complex(1.0 - z)
    else:
        zm1 = z - 1.0
        t = zm1 + _LANCZOS_G + 0.5
        result = (zm1 + 0.5) * cmath.log(t) - t + _LN_SQRT_2PI + cmath.log(_lanczos_sum(zm1))
    if not (math.isfinite(result.real) and math.isfinite(result.imag)):
        raise SpecialFunctionError(f"log-gamma evaluation failed at z = {z}")
    return result


def log_abs_gamma_sq(h: float, x: float) -> float:
    """log |Gamma(h + ix)|^2, the quantity the spectral closed form consumes."""
    return 2.0 * loggamma_complex(complex(h, x)).real
