import math

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpc, mpfr

from jacobi_jost.coeffs import CoefficientModel, Variant, classify
from jacobi_jost.errors import DomainError
from jacobi_jost.jost import (
    ConstantsMethod,
    asymptotic_constants,
    conjugate_jost,
    expected_pair_wronskian,
    fit_exponents,
    jost_report,
    jost_solution,
    reconstruction_error,
    wronskian_pair_check,
)
from jacobi_jost.recurrence import forward_polynomials, second_solution, wronskian_raw
from jacobi_jost.scalednum import working_precision
from jacobi_jost.spectral import refine_zero


@pytest.fixture(scope="module")
def js_super(super_model):
    return jost_solution(super_model, 0, N=10**4)


@pytest.fixture(scope="module")
def js_osc0(osc_model):
    return jost_solution(osc_model, 0, N=10**4)


@pytest.fixture(scope="module")
def js_osc1(osc_model):
    return jost_solution(osc_model, 1, N=2000)


def test_decaying_profile(js_super):
    ns = [int(n) for n in np.arange(100, 10**4, 37)]
    with working_precision(js_super.bits):
        dev = np.array(
            [float(gmpy2.log(abs(js_super[n])) + 0.75 * gmpy2.log(mpfr(n)) + 4 * gmpy2.sqrt(mpfr(n))) for n in ns]
        )
    scaled = np.abs(dev) * np.array(ns) ** 0.5
    assert scaled[-20:].max() <= 1.05 * scaled[:20].max()
    assert abs(dev[-1]) < 2e-2
    assert js_super.diagnostics["omega_wronskian_deviation"] < 1e-60
    assert js_super.diagnostics["u_consistency"] < 1e-60


def test_oscillating_profile(js_osc0):
    with working_precision(js_osc0.bits):
        vals = {n: float(abs(js_osc0[n]) * mpfr(n) ** mpfr(0.75)) for n in (100, 1000, 10**4)}
    assert vals[10**4] == pytest.approx(1, abs=1e-4)
    # |deviation| falls by ~sqrt(10) per decade
    r1 = abs(vals[100] - 1) / abs(vals[1000] - 1)
    r2 = abs(vals[1000] - 1) / abs(vals[10**4] - 1)
    assert 2 < r1 < 20 and 2 < r2 < 20


def test_conjugate_real_lambda(js_osc1):
    ft = conjugate_jost(js_osc1)
    with working_precision(js_osc1.bits):
        for n in (-1, 0, 5, 1999):
            assert ft[n] == js_osc1[n].conjugate()


@pytest.mark.parametrize("z", [0, 1, 1j])
def test_pair_wronskian(osc_model, z):
    js = jost_solution(osc_model, z, N=2000)
    rep = wronskian_pair_check(js, conjugate_jost(js))
    assert rep["relative_deviation"] <= 1e-8
    cls = classify(osc_model)
    assert complex(expected_pair_wronskian(cls)) == -4j


def test_pair_wronskian_constant(js_osc0):
    ft = conjugate_jost(js_osc0)
    with working_precision(js_osc0.bits):
        w0 = wronskian_raw(js_osc0.model, js_osc0.f, ft, 0)
        w1 = wronskian_raw(js_osc0.model, js_osc0.f, ft, 1000)
        assert abs(w0 - w1) <= abs(w0) * mpfr(10) ** -20
        assert wronskian_raw(js_osc0.model, js_osc0.f, js_osc0.f, 7) == 0
        assert abs(w0 + 4j) < 1e-25


def test_reconstruction(osc_model, js_osc1):
    ft = conjugate_jost(js_osc1)
    P = forward_polynomials(osc_model, 1, js_osc1.f.end, bits=js_osc1.bits)
    c = asymptotic_constants(osc_model, 1, js_osc1, partner=ft, P=P)
    assert c.method is ConstantsMethod.WRONSKIAN_SYSTEM
    with working_precision(js_osc1.bits):
        assert abs(c.kappa_minus - c.kappa_plus.conjugate()) <= 1e-15 * abs(c.kappa_plus)
        ns = range(100, 1001)
        res = [float(abs(P[n] - c.kappa_plus * js_osc1[n] - c.kappa_minus * ft[n])) * n**0.75 for n in ns]
    fit_c = max(r * n**0.5 for r, n in zip(res, ns))
    assert fit_c < 1e-6
    assert complex(c.kappa_plus) == pytest.approx(1.0778630914765925 - 6.619027367962097j, rel=1e-12)
    err = reconstruction_error(osc_model, P, js_osc1.f, ft, c, [100, 500, 1000])
    assert err.max() < 1e-10


def test_supercritical_constants(super_model, js_super):
    g = second_solution(super_model, js_super.f)
    P = forward_polynomials(super_model, 0, js_super.f.end, bits=js_super.bits)
    c = asymptotic_constants(super_model, 0, js_super, partner=g, P=P)
    assert c.method is ConstantsMethod.JOST_FUNCTION
    with working_precision(js_super.bits):
        assert abs(c.kappa + js_super.omega_raw) == 0
        # g_n ~ nu^{n+1} n^s e^{4 sqrt n} / (2 sqrt tau): the constant tends to -ln 4
        lead = [float(gmpy2.log(abs(g[n])) + 0.75 * gmpy2.log(mpfr(n)) - 4 * gmpy2.sqrt(mpfr(n))) for n in (2500, 10**4)]
        # P_n / (nu^n n^s e^{4 sqrt n}) tends to kappa_leading, not to -Omega
        ratio = [P[n] * (-1) ** n * mpfr(n) ** mpfr(0.75) / gmpy2.exp(4 * gmpy2.sqrt(mpfr(n))) for n in (2500, 10**4)]
    assert abs(lead[1] + math.log(4)) < 0.05
    assert abs(lead[1] + math.log(4)) < abs(lead[0] + math.log(4))
    lead_coef = complex(c.kappa_leading)
    assert abs(complex(ratio[1]) - lead_coef) < abs(complex(ratio[0]) - lead_coef)
    assert abs(complex(ratio[1]) / lead_coef - 1) < 0.02
    assert float(js_super.omega_raw.real) == pytest.approx(10**-0.51, rel=0.01)


def test_eigenvalue_decay(super_model):
    lam, _ = refine_zero(super_model, 1.570089268366175)
    js = jost_solution(super_model, lam, N=2000)
    g = second_solution(super_model, js.f)
    P = forward_polynomials(super_model, lam, 40, bits=js.bits)
    with working_precision(js.bits):
        c = wronskian_raw(super_model, P, g, 0)
        for n in (5, 20, 40):
            assert abs(P[n] / js[n] - c) <= abs(c) * mpfr(10) ** -20


def test_report_and_exponents(js_super):
    fe = fit_exponents(js_super)
    assert fe["u_decay"] == pytest.approx(-0.5, abs=0.05)
    assert fe["remainder_decay"] == pytest.approx(-2, abs=0.05)
    rep = jost_report(js_super)
    assert rep["tau"] == "4" and rep["tail_mode"] == "asymptotic"
    assert rep["residuals"]["recurrence"] < 1e-80


def test_domain_errors(js_super):
    with pytest.raises(DomainError):
        jost_solution(CoefficientModel(Variant.LAGUERRE, {"p": 0}), 0)
    with pytest.raises(DomainError):
        wronskian_pair_check(js_super, js_super.f)
    with pytest.raises(DomainError):
        asymptotic_constants(js_super.model, 1, js_super)
