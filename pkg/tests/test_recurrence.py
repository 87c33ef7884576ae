from fractions import Fraction as F

import gmpy2
import mpmath
import pytest
from gmpy2 import mpc, mpfr

from jacobi_jost.coeffs import CoefficientModel, Variant, powerlaw
from jacobi_jost.errors import DomainError, RangeError
from jacobi_jost.recurrence import (
    backward_solution,
    default_bits,
    forward_polynomials,
    recurrence_residual,
    second_solution,
    wronskian,
    wronskian_raw,
)
from jacobi_jost.scalednum import working_precision

HERMITE = CoefficientModel(Variant.HERMITE)


def mp(x):
    return mpmath.mpc(str(x.real), str(x.imag))


def test_first_polynomial():
    m = powerlaw(2, tau=4)
    z = mpc(0.3, -1.2)
    P = forward_polynomials(m, z, 3)
    with working_precision(P.bits):
        a0, b0 = m.pair(0)
        assert P[-1] == 0 and P[0] == 1
        assert abs(P[1] - (z - b0) / a0) < mpfr(2) ** (-P.bits + 4)


def test_hermite_hand_value():
    P = forward_polynomials(HERMITE, 1, 2)
    assert abs(complex(P[2]) - 2**-0.5) < 1e-30


def test_hermite_against_mpmath():
    with working_precision(300):
        z = mpc("0.7+0.4j")
    P = forward_polynomials(HERMITE, z, 40, bits=300)
    with mpmath.workprec(320):
        zz = mpmath.mpc("0.7", "0.4")
        for n in (0, 1, 5, 17, 40):
            ref = mpmath.hermite(n, zz) / mpmath.sqrt(2**n * mpmath.factorial(n))
            assert abs(mp(P[n]) - ref) / abs(ref) < mpmath.mpf(2) ** -280


@pytest.mark.parametrize("p", [F(0), F(1, 2), F(-1, 2)])
def test_laguerre_against_mpmath(p):
    m = CoefficientModel(Variant.LAGUERRE, {"p": p})
    P = forward_polynomials(m, mpfr("2.5"), 30, bits=300)
    with mpmath.workprec(320):
        pp = mpmath.mpf(p.numerator) / p.denominator
        for n in (1, 7, 30):
            norm = mpmath.sqrt(mpmath.factorial(n) * mpmath.gamma(pp + 1) / mpmath.gamma(n + pp + 1))
            ref = (-1) ** n * mpmath.laguerre(n, pp, mpmath.mpf("2.5")) * norm
            assert abs(mp(P[n]) - ref) <= abs(ref) * mpmath.mpf(2) ** -270


def test_laguerre_at_zero_alternates():
    P = forward_polynomials(CoefficientModel(Variant.LAGUERRE, {"p": 0}), 0, 20)
    for n in range(21):
        assert P[n] == (-1) ** n


def test_free_matrix_backward_pattern():
    free = CoefficientModel(Variant.TABLE, table=tuple((1, 0) for _ in range(8)))
    f = backward_solution(free, 0, (1, 0), 3)
    # f_{n-1} = -f_{n+1} at z = 0, b = 0, a = 1; a_{-1} = 1/2 doubles f_{-1}
    assert [complex(f[n]) for n in range(0, 5)] == [0, -1, 0, 1, 0]
    assert complex(f[-1]) == 2


def test_backward_roundtrip():
    m = powerlaw(2, tau=-4)
    z = mpc(0.5, 0.25)
    for M in (5, 20, 50):
        P = forward_polynomials(m, z, M + 1)
        B = backward_solution(m, z, (P[M], P[M + 1]), M, bits=P.bits)
        with working_precision(P.bits):
            assert abs(B[-1]) <= mpfr(2) ** (-P.bits + 40)
            assert abs(B[0] - 1) <= mpfr(2) ** (-P.bits + 40)


def test_wronskian_properties():
    m = powerlaw(F(7, 4), tau=1)
    z = mpc(1.5, 0.5)
    bits = default_bits(m, 60)
    F1 = backward_solution(m, z, (1, 0), 60, bits=bits)
    F2 = backward_solution(m, z, (0, 1), 60, bits=bits)
    with working_precision(bits):
        assert wronskian_raw(m, F1, F1, 7) == 0
        P = forward_polynomials(m, z, 60, bits=bits)
        assert abs(wronskian_raw(m, P, P.scale(mpc(3, 2)), 11)) <= abs(P[12]) ** 2 * mpfr(2) ** (-bits + 8)
        w = [wronskian_raw(m, F1, F2, n) for n in (-1, 0, 17)]
        # the guard bits above the 256-bit base absorb the accumulated rounding
        tol = mpfr(10) ** (-0.3 * m.precision)
        assert all(abs(x - w[0]) <= tol * abs(w[0]) for x in w)
        assert wronskian(m, F1, F2, 0).to_mpc() == w[1]
    with pytest.raises(RangeError):
        wronskian_raw(m, F1, F2, 61)
    with pytest.raises(DomainError):
        wronskian_raw(m, F1, forward_polynomials(m, 0, 60, bits=bits), 3)


def test_residual_small():
    m = powerlaw(2, tau=4)
    P = forward_polynomials(m, mpc(0, 1), 500)
    assert recurrence_residual(m, P) < 2.0 ** (-P.bits + 20)


def test_second_solution_wronskian():
    m = powerlaw(2, tau=4)
    bits = default_bits(m, 200)
    f = backward_solution(m, 0, (1, mpfr("0.5")), 200, bits=bits)
    g = second_solution(m, f)
    with working_precision(bits):
        for n in (-1, 0, 50, 199):
            assert abs(wronskian_raw(m, f, g, n) - 1) <= mpfr(10) ** (-0.3 * m.precision)
    # with n0 = 1 the first computed entry is a single term of the sum
    g1 = second_solution(m, f, n0=1)
    with working_precision(bits):
        a0 = m.a_at(0)
        assert abs(g1[1] - f[1] / (a0 * f[0] * f[1])) <= abs(g1[1]) * mpfr(2) ** (-bits + 8)
