import cmath
import math

import pytest
import scipy.special as sp
from hypothesis import given
from hypothesis import strategies as st

from anisofield import SpecialFunctionError
from anisofield.gammafn import log_abs_gamma_sq, loggamma_complex

import oracle_values as oracle


@pytest.mark.parametrize(
    "re, im, expected",
    [(re, im, value) for (re, im), value in sorted(oracle.LOGGAMMA.items())],
)
def test_frozen_values(re, im, expected):
    got = loggamma_complex(complex(re, im))
    want = complex(*expected)
    assert got.real == pytest.approx(want.real, rel=1e-13, abs=1e-13)
    assert got.imag == pytest.approx(want.imag, rel=1e-13, abs=1e-13)


@given(
    st.floats(min_value=-2.8, max_value=4.0),
    st.floats(min_value=-20.0, max_value=20.0).filter(lambda x: abs(x) > 1e-3),
)
def test_matches_scipy_off_the_real_axis(re, im):
    # real parts agree exactly; imaginary parts agree modulo 2 pi (the
    # reflection formula can land on a different sheet than scipy's branch)
    z = complex(re, im)
    got = loggamma_complex(z)
    want = sp.loggamma(z)
    assert got.real == pytest.approx(want.real, rel=1e-12, abs=1e-12)
    winding = (got.imag - want.imag) / (2.0 * math.pi)
    assert abs(winding - round(winding)) < 1e-12


@given(st.floats(min_value=0.05, max_value=4.0))
def test_real_axis_matches_lgamma(x):
    got = loggamma_complex(complex(x, 0.0))
    assert got.imag == pytest.approx(0.0, abs=1e-13)
    assert got.real == pytest.approx(math.lgamma(x), rel=1e-13, abs=1e-13)


@given(
    st.floats(min_value=0.6, max_value=3.0),
    st.floats(min_value=-5.0, max_value=5.0),
)
def test_recurrence(re, im):
    # Gamma(z + 1) = z Gamma(z); in the right half-plane no branch jump occurs
    z = complex(re, im)
    lhs = loggamma_complex(z + 1)
    rhs = loggamma_complex(z) + cmath.log(z)
    assert cmath.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


@pytest.mark.parametrize("z", [0.0, -1.0, -2.0, complex(-3.0, 0.0)])
def test_poles_raise(z):
    with pytest.raises(SpecialFunctionError):
        loggamma_complex(complex(z))


@given(st.floats(min_value=0.1, max_value=30.0))
def test_half_line_modulus(x):
    # |Gamma(1/2 + ix)|^2 = pi / cosh(pi x)
    got = log_abs_gamma_sq(0.5, x)
    want = math.log(math.pi) - math.log(math.cosh(math.pi * x)) if x < 20 else (
        math.log(math.pi) - (math.pi * x + math.log1p(math.exp(-2 * math.pi * x)) - math.log(2.0))
    )
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_large_imaginary_part_stays_finite():
    # direct |Gamma(h + ix)|^2 underflows long before x = 500; the log form must not
    value = log_abs_gamma_sq(0.3, 500.0)
    assert math.isfinite(value)
    assert value < -700.0
