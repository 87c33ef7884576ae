from fractions import Fraction as F

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpc, mpfr

from jacobi_jost.ansatz import (
    AnsatzVariant,
    build_ansatz,
    diagnostic_csv,
    error_majorant,
    kernel,
    local_terms,
    majorant_profile,
    remainder,
    remainder_expanded,
)
from jacobi_jost.coeffs import CoefficientModel, Variant, powerlaw
from jacobi_jost.errors import DomainError, UnsupportedError
from jacobi_jost.scalednum import working_precision

BITS = 320


@pytest.fixture(scope="module")
def k_super(super_model):
    return kernel(super_model, build_ansatz(super_model, bits=BITS), 0, 10**4)


def test_q_closed_forms(super_model, osc_model):
    A = build_ansatz(super_model, bits=BITS)
    B = build_ansatz(osc_model, bits=BITS)
    with working_precision(BITS):
        for n in (1, 2, 9, 400):
            ref = (-1) ** n * mpfr(n) ** mpfr(-0.75) * gmpy2.exp(-4 * gmpy2.sqrt(mpfr(n)))
            assert abs(A.Q_raw(n) - ref) <= abs(ref) * mpfr(2) ** (-BITS + 16)
            refb = (-1) ** n * mpfr(n) ** mpfr(-0.75) * gmpy2.exp(mpc(0, -4) * gmpy2.sqrt(mpfr(n)))
            assert abs(B.Q_raw(n) - refb) <= abs(refb) * mpfr(2) ** (-BITS + 16)
        for Q in (A, B):
            assert Q.Q_raw(0) == 1 and Q.Q_raw(-1) == 1
        # far beyond double range, still a finite MPFR value
        assert float(gmpy2.log10(abs(A.Q_raw(10**12)))) < -1.7e6


def test_ratio_up_consistent(osc_model):
    A = build_ansatz(osc_model, bits=BITS)
    with working_precision(BITS):
        for n in (1, 5, 300):
            assert abs(A.ratio_up(n) - A.Q_raw(n + 1) / A.Q_raw(n)) <= mpfr(2) ** (-BITS + 24)


def _slope(model, lo=10**3, hi=10**5, z=0):
    A = build_ansatz(model, bits=BITS)
    ns = np.unique(np.geomspace(lo, hi, 25).astype(int))
    with working_precision(BITS):
        r = [float(abs(remainder(model, A, z, int(n)))) for n in ns]
    return np.polyfit(np.log(ns), np.log(r), 1)[0]


@pytest.mark.parametrize("sigma, tau", [(2, 4), (2, -4), (F(7, 4), 1), (F(7, 4), -1)])
def test_remainder_decay(sigma, tau):
    assert abs(_slope(powerlaw(sigma, tau=tau), z=1) + float(min(F(sigma), 2))) <= 0.15


def test_remainder_faster_at_zero():
    # for sigma < 2 the n^-sigma part of r_n is the z term alone
    assert abs(_slope(powerlaw(F(7, 4), tau=-1), z=0) + 2) <= 0.05


def test_remainder_z_linear(super_model):
    A = build_ansatz(super_model, bits=BITS)
    z = mpc(0.7, -2.5)
    with working_precision(BITS):
        for n in (3, 50, 1234):
            a0, a1 = super_model.a_at(n - 1), super_model.a_at(n)
            diff = remainder(super_model, A, z, n) - remainder(super_model, A, 0, n)
            assert abs(diff + z / gmpy2.sqrt(a0 * a1)) <= mpfr(2) ** (-BITS + 32)


def test_remainder_expanded_agrees(osc_model):
    A = build_ansatz(osc_model, bits=BITS)
    with working_precision(BITS):
        for n in (2, 10, 5000):
            x, y = remainder(osc_model, A, 1, n), remainder_expanded(osc_model, A, 1, n)
            assert abs(x - y) <= abs(x) * mpfr(2) ** (-BITS + 64)


def test_kernel_identities(k_super):
    k = k_super
    with working_precision(k.bits):
        for n in (0, 1, 17, 5000):
            assert abs(k.G(n, n + 1) - 1) <= mpfr(2) ** (-k.bits + 10)
        for n in range(1, k.N + 1, 97):
            assert abs(k.Lambda(n) * k.X[n - 1] - k.X[n]) <= abs(k.X[n]) * mpfr(2) ** (-k.bits + 10)
        # prefix-sum G against the double-sum definition
        for n, m in ((0, 200), (40, 900)):
            assert abs(k.G(n, m) - k.G_direct(n, m)) <= abs(k.G_direct(n, m)) * mpfr(2) ** (-k.bits + 40)
        ms = np.unique(np.geomspace(2, k.N, 40).astype(int))
        g = np.array([float(abs(k.G(0, int(m)))) / m**0.5 for m in ms])
    assert g.max() < 10 * g[len(g) // 2]


def test_local_terms_match_kernel(k_super, super_model):
    lam, R = local_terms(super_model, k_super.ansatz, 0, 321)
    with working_precision(k_super.bits):
        assert abs(lam - k_super.Lam[321]) <= abs(lam) * mpfr(2) ** (-k_super.bits + 20)
        assert abs(R - k_super.R[321]) <= abs(R) * mpfr(2) ** (-k_super.bits + 40)


def test_majorant(k_super):
    h, H, info = majorant_profile(k_super)
    assert np.all(np.diff(H) <= 1e-15)
    m = np.arange(100, 10**4 + 1)
    scaled = h[m] * m**1.5
    assert scaled.max() < 5 * np.median(scaled)
    assert np.isfinite(np.expm1(H[0]))
    assert info["reliable"] and abs(info["fitted_exponent"] + 1.5) < 0.1
    mr = error_majorant(k_super, 100)
    assert mr.H_n == pytest.approx(H[100]) and mr.reliable
    with pytest.raises(DomainError):
        error_majorant(k_super, 10**4)


def test_diagnostic_csv(k_super):
    text = diagnostic_csv(k_super, rows=range(1, 4))
    lines = text.strip().splitlines()
    assert lines[0].startswith("n,re_theta") and len(lines) == 4


def test_ansatz_domain():
    with pytest.raises(UnsupportedError):
        build_ansatz(CoefficientModel(Variant.LAGUERRE, {"p": 0}))
    with pytest.raises(DomainError):
        build_ansatz(powerlaw(2, tau=1, gamma=2))
    with pytest.raises(DomainError):
        build_ansatz(powerlaw(2, tau=1), AnsatzVariant.ZERO_DIAG_NON_CARLEMAN)
    zd = CoefficientModel(Variant.ZERO_DIAG_POWERLAW, {"sigma": 3, "alpha_hat": 0})
    A = build_ansatz(zd, AnsatzVariant.ZERO_DIAG_NON_CARLEMAN, bits=BITS)
    with working_precision(BITS):
        assert abs(abs(A.Q_raw(10)) - 1 / gmpy2.sqrt(zd.a_at(10))) < mpfr(2) ** (-BITS + 8)
    with pytest.raises(DomainError):
        remainder(zd, A, 0, 0)
