import math

import numpy as np
import pytest

from jacobi_jost.coeffs import CoefficientModel, Variant, powerlaw
from jacobi_jost.errors import DomainError, UnresolvedSpectrumError
from jacobi_jost.spectral import (
    Method,
    converged_truncation,
    deficiency_probe,
    jost_function,
    jost_zero_scan,
    refine_zero,
    resolvent_check,
    spectral_weights,
    truncated_eigs,
)

# finite sections at N = 128 (shift below 1e-12 from N = 64) and Jost zeros agree on these
EIGS = [1.570089268366175, 4.289154163362099, 10.54066229637499, 19.145012096931282, 29.35452730638076]
# N = 256 section at 300 bits and the Newton-refined Jost zero agree to 3e-53
LAMBDA0_HP = "1.57008926836598962813501238208288574478551242"


@pytest.fixture(scope="module")
def scan(super_model):
    return jost_zero_scan(super_model, (-5, 40), tol=1e-13)


def test_free_matrix():
    free = CoefficientModel(Variant.TABLE, table=tuple((1, 0) for _ in range(6)))
    vals = truncated_eigs(free, 5, rel_width=1e-14).values
    ref = sorted(2 * math.cos(k * math.pi / 6) for k in range(1, 6))
    assert np.allclose(vals, ref, atol=1e-12)
    one = truncated_eigs(powerlaw(2, tau=4), 1).values
    assert one == pytest.approx([2.0])


def test_truncation_against_numpy(super_model):
    from jacobi_jost.scalednum import working_precision

    N = 40
    with working_precision(256):
        a, b = super_model.arrays(N)
        J = np.diag([float(x) for x in b[:N]]) + np.diag([float(x) for x in a[: N - 1]], 1) + np.diag([float(x) for x in a[: N - 1]], -1)
    ref = np.linalg.eigvalsh(J)
    ref = ref[(ref > -5) & (ref < 40)]
    got = truncated_eigs(super_model, N, (-5, 40), rel_width=1e-14).values
    assert np.allclose(got, ref, rtol=1e-11, atol=1e-11)


def test_truncation_mpfr_width(super_model):
    import gmpy2

    rep = truncated_eigs(super_model, 256, (1, 2), rel_width=1e-50, bits=300)
    lam = rep.eigenvalues[0].value
    assert abs(lam - gmpy2.mpfr(LAMBDA0_HP, 300)) < 1e-43


def test_scan_matches_frozen(scan):
    assert scan.method is Method.JOST_ZERO
    assert np.allclose(scan.values, EIGS, atol=1e-10, rtol=0)
    assert scan.info["confirmed"] and scan.info["max_im_ratio"] <= 1e-20


def test_converged_truncation(super_model):
    tr = converged_truncation(super_model, (-5, 40))
    assert np.allclose(tr.values, EIGS, atol=1e-9, rtol=0)
    shifts = [h["max_shift"] for h in tr.convergence if h["max_shift"] is not None]
    assert shifts[-1] < 1e-9


def test_omega_sign_alternates(super_model, scan):
    mids = [0.5 * (a + b) for a, b in zip([-5] + scan.values, scan.values + [40])]
    signs = [np.sign(float(jost_function(super_model, x).real)) for x in mids]
    assert all(s1 == -s2 for s1, s2 in zip(signs, signs[1:]))


def test_refine_zero(super_model):
    lam, slope = refine_zero(super_model, EIGS[0])
    import gmpy2

    assert abs(lam - gmpy2.mpfr(LAMBDA0_HP, 300)) < 1e-43
    assert slope > 0


def test_weights(super_model):
    w = spectral_weights(super_model, EIGS[0])
    assert w["relative_disagreement"] <= 1e-6
    assert w["w_jost"] == pytest.approx(0.8425290138164027, rel=1e-12)
    w_small = spectral_weights(super_model, EIGS[0], N_sum=20)
    assert w["w_sum"] <= w_small["w_sum"]
    with pytest.raises(DomainError):
        spectral_weights(super_model, 3.0)


def test_weight_partial_sums(super_model):
    ws = [spectral_weights(super_model, lam)["w_jost"] for lam in EIGS]
    sums = np.cumsum(ws)
    assert np.all(np.diff(sums) > 0) and sums[-1] <= 1 + 1e-12
    assert 1 - sums[-1] < 1e-8


def test_scan_errors(super_model, osc_model):
    with pytest.raises(DomainError):
        jost_zero_scan(osc_model, (0, 1))
    with pytest.raises(DomainError):
        jost_zero_scan(super_model, (1, 0))
    with pytest.raises(UnresolvedSpectrumError) as exc:
        jost_zero_scan(super_model, (-5, 40), grid=8, max_doublings=1)
    assert exc.value.partial is not None


def test_resolvent(super_model):
    rep = resolvent_check(super_model, 1j, n_max=6, N_section=300)
    assert rep["symmetry"] < 1e-60
    assert rep["equation_residual"] < 1e-60
    assert rep["finite_section_deviation"] < 1e-40
    with pytest.raises(DomainError):
        resolvent_check(super_model, 1.0)


def test_deficiency_oscillating(osc_model):
    rep = deficiency_probe(osc_model, 1j, N=8000, levels=4)
    assert rep["P"]["verdict"] == "saturates" and rep["F"]["verdict"] == "saturates"
    assert "(1,1)" in rep["conclusion"]
    # |P_n|^2 ~ n^{-3/2}: the relative increment of the partial norm falls like N^{-1/2}
    inc = [r["relative_increment"] for r in rep["P"]["partial_norms"][1:]]
    for x, y in zip(inc, inc[1:]):
        assert y / x == pytest.approx(2**-0.5, rel=0.2)


def test_deficiency_growing(super_model):
    rep = deficiency_probe(super_model, 1j, N=4000, levels=3)
    assert rep["P"]["verdict"] == "diverges"
    assert rep["F"]["verdict"] == "saturates"
    with pytest.raises(DomainError):
        deficiency_probe(super_model, 1.0, N=100)
