import math

import gmpy2
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_jost.errors import DomainError, RangeError
from jacobi_jost.scalednum import (
    PrecisionPolicy,
    ScaledComplex,
    format_real,
    format_scaled,
    make_scaled,
    scaled_exp,
    to_log_magnitude,
    working_precision,
)

BITS = 200

finite = st.floats(min_value=-1e300, max_value=1e300, allow_nan=False, allow_infinity=False)
nonzero = finite.filter(lambda x: abs(x) > 1e-300)
exps = st.integers(min_value=-(10**12), max_value=10**12)


def sc(re, im, e):
    with working_precision(BITS):
        return make_scaled(gmpy2.mul_2exp(mpc(re, im), 0)) * ScaledComplex(mpc(1), e)


def test_examples():
    with working_precision(BITS):
        z = make_scaled(0)
        assert z.is_zero() and z.exp2 == 0
        a = make_scaled(1.5)
        assert (a.mantissa, a.exp2) == (mpc(1.5), 0)
        b = make_scaled(6)
        assert (b.mantissa, b.exp2) == (mpc(1.5), 2)
        p = b * b
        assert (p.mantissa, p.exp2) == (mpc(1.125), 5)
        assert (make_scaled(1) + make_scaled(-1)).is_zero()
        big = ScaledComplex(mpc(1), 1000) + ScaledComplex(mpc(1), -1000)
        assert big == ScaledComplex(mpc(1), 1000)
        assert to_log_magnitude(make_scaled(1)) == 0
        assert abs(to_log_magnitude(b) - gmpy2.log(mpfr(6))) < mpfr(2) ** (-BITS + 4)
        lg = to_log_magnitude(ScaledComplex(mpc(1), 2000))
        assert abs(lg - 2000 * gmpy2.const_log2()) < mpfr(2) ** (-BITS + 16)


@settings(max_examples=200, deadline=None)
@given(nonzero, finite, exps)
def test_mantissa_normalized(re, im, e):
    x = sc(re, im, e)
    with working_precision(BITS):
        assert 1 <= abs(x.mantissa) < 2


@settings(max_examples=200, deadline=None)
@given(nonzero, nonzero, exps, nonzero, nonzero, exps)
def test_mul_div_roundtrip(r1, i1, e1, r2, i2, e2):
    a, b = sc(r1, i1, e1), sc(r2, i2, e2)
    with working_precision(BITS):
        back = (a * b) / b
        rel = abs(back.to_mpc() / a.to_mpc() - 1) if abs(e1) < 10**6 else abs(back.mantissa / a.mantissa - 1)
        assert back.exp2 in (a.exp2 - 1, a.exp2, a.exp2 + 1)
        assert rel < mpfr(2) ** (-BITS + 8)


@settings(max_examples=200, deadline=None)
@given(nonzero, nonzero, st.integers(-500, 500), nonzero, nonzero, st.integers(-500, 500))
def test_add_matches_mpc(r1, i1, e1, r2, i2, e2):
    a, b = sc(r1, i1, e1), sc(r2, i2, e2)
    with working_precision(BITS + 600):
        exact = a.to_mpc() + b.to_mpc()
    with working_precision(BITS):
        s = a + b
        if exact == 0:
            assert s.is_zero()
        else:
            scale = max(abs(a.to_mpc()), abs(b.to_mpc()))
            assert abs(s.to_mpc() - exact) <= scale * mpfr(2) ** (-BITS + 6)


@settings(max_examples=100, deadline=None)
@given(nonzero, nonzero, exps)
def test_log_magnitude_additive(re, im, e):
    a = sc(re, im, e)
    with working_precision(BITS):
        sq = a * a
        assert abs(to_log_magnitude(sq) - 2 * to_log_magnitude(a)) < mpfr(2) ** (-BITS + 48)


def test_scaled_exp_huge():
    with working_precision(BITS):
        x = scaled_exp(mpc(10**9, 0.5))
        assert abs(to_log_magnitude(x) - 10**9) < mpfr(2) ** (-BITS + 40)
        unit = x.mantissa / abs(x.mantissa)
        assert abs(unit - mpc(gmpy2.cos(mpfr(0.5)), gmpy2.sin(mpfr(0.5)))) < mpfr(2) ** (-BITS + 8)


def test_range_and_domain_errors():
    with working_precision(BITS):
        with pytest.raises(RangeError):
            ScaledComplex(mpc(1), 2**62) * ScaledComplex(mpc(1), 2**62)
        with pytest.raises(DomainError):
            make_scaled(mpc("inf"))
        with pytest.raises(DomainError):
            make_scaled(1) / make_scaled(0)
        with pytest.raises(AttributeError):
            make_scaled(1).exp2 = 3


def test_formatting():
    with working_precision(BITS):
        assert format_real(mpfr(-1) / 3 * mpfr(10) ** -40, 10) == "-3.333333333e-41"
        assert format_real(0) == "0"
        s = format_scaled(make_scaled(mpc(0, 1000)))
        assert s.startswith("(0.000+1.000i)") and s.endswith("10^3.00")


def test_precision_policy():
    p = PrecisionPolicy(256, 10**4, 2.0)
    assert p.cancellation_guard == math.ceil(2 * math.log2(10**4)) + 64
    assert p.effective_bits == 256 + p.cancellation_guard
    with pytest.raises(DomainError):
        PrecisionPolicy(0)
