import dataclasses
import math

import numpy as np
import pytest
from gmpy2 import mpc, mpfr

from jacobi_jost.ansatz import build_ansatz, kernel, majorant_profile
from jacobi_jost.coeffs import powerlaw
from jacobi_jost.errors import DomainError, HorizonError
from jacobi_jost.scalednum import working_precision
from jacobi_jost.volterra import (
    fixed_point_residual,
    solve_backward,
    solve_series,
    tail_exponents,
)


@pytest.fixture(scope="module")
def k_super(super_model):
    return kernel(super_model, build_ansatz(super_model), 0, 10**4)


@pytest.fixture(scope="module")
def k_osc(osc_model):
    return kernel(osc_model, build_ansatz(osc_model), 1, 3000)


def test_zero_perturbation(k_super):
    with working_precision(k_super.bits):
        zeros = [mpc(0)] * len(k_super.R)
    k0 = dataclasses.replace(k_super, R=zeros)
    sol = solve_backward(k0, tail="unit", M=500, majorant=(np.zeros(501), np.zeros(501), {"warning": "", "tail": 0.0, "fitted_exponent": 0.0, "exponent": 0.0, "amplitude": 0.0, "reliable": True}))
    assert all(v == 1 for v in sol.u)


def test_decay_rates(k_super):
    sol = solve_backward(k_super, tol=1e-20)
    assert sol.tail_mode == "asymptotic" and sol.tail_bound <= 1e-20
    ns = np.arange(100, 10**4)
    with working_precision(sol.bits):
        du = np.array([float(abs(sol.u[n] - 1)) for n in ns])
        dd = np.array([float(abs(sol.u[n] - sol.u[n + 1])) for n in ns])
    a = du * ns**0.5
    b = dd * ns**1.0
    # bounded: the late decade does not exceed the early one
    assert a[-1000:].max() <= 1.05 * a[:1000].max()
    assert b[-1000:].max() <= 1.05 * b[:1000].max()
    assert 0.1 < a[-1] / a[:1000].max()


def test_fixed_point(k_super):
    sol = solve_backward(k_super, tol=1e-20)
    assert fixed_point_residual(k_super, sol, samples=8) < 1e-60


def test_series_oracle(k_osc):
    K, W = 12, 500
    sr = solve_series(k_osc, K, W)
    assert sr.bound_violations == []
    unit = solve_backward(k_osc, tail="unit", M=W, tol=1e-3)
    with working_precision(k_osc.bits):
        # first iterate equals sum_{m > n} G_{n,m} R_m exactly (window-truncated)
        for n in (0, 17, 250):
            direct = sum((k_osc.G_direct(n, m) * k_osc.R[m] for m in range(n + 1, W + 1)), mpc(0))
            assert abs(sr.partial_sums[1][n] - 1 - direct) <= mpfr(2) ** (-k_osc.bits + 40)
        for n in range(0, W + 1):
            H = sr.H[n]
            bound = H ** (K + 1) / math.factorial(K + 1) * math.exp(H)
            assert float(abs(sr.partial_sums[K][n] - unit.u[n])) <= bound + 1e-60


def test_unit_tail_horizon(k_osc):
    with pytest.raises(HorizonError) as exc:
        solve_backward(k_osc, tol=1e-3, tail="unit")
    assert exc.value.best_bound > 1e-3
    with pytest.raises(DomainError):
        solve_backward(k_osc, tol=-1)
    with pytest.raises(DomainError):
        solve_series(k_osc, 0, 10)


def test_tail_exponents():
    from fractions import Fraction as F

    ex = tail_exponents(F(2), F(3))
    assert ex[0] == F(1, 2) and ex == sorted(set(ex)) and F(3) in ex
    ex74 = tail_exponents(F(7, 4), F(1))
    assert F(1, 4) in ex74 and F(3, 4) in ex74


def test_asymptotic_tail_m_independent(osc_model):
    A = build_ansatz(osc_model)
    u0 = []
    for N in (2000, 4000):
        k = kernel(osc_model, A, 0, N)
        u0.append(solve_backward(k, tol=1e-25).u[0])
    with working_precision(A.bits):
        assert abs(u0[0] - u0[1]) < mpfr(10) ** -30
