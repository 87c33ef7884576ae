"""Jost solutions f_n = Q_n u_n, the Jost function and the asymptotic constants.

The Jost solution is assembled from the Volterra factor on [0, M+1] and then
carried down to n = -1 by the backward recurrence started from
(f_M, f_{M+1}), so the stored sequence satisfies the recurrence to roundoff
on its whole range. The Jost function is Omega(z) = W[P, f] = -f_{-1}/2.

For tau < 0 the polynomials are a combination of the Jost solution and its
conjugate, P = kappa_+ f + kappa_- f~, and the constants come from Cramer's
rule with the measured Wronskian W[f, f~]. For tau > 0 one has
P = omega f - Omega g with the summation-built second solution g.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .ansatz import Ansatz, AnsatzVariant, KernelData, build_ansatz, kernel
from .coeffs import Cell, Classification, CoefficientModel, classify
from .errors import DomainError, VerificationError
from .recurrence import (
    SolutionSeq,
    backward_solution,
    default_bits,
    forward_polynomials,
    recurrence_residual,
    second_solution,
    wronskian_raw,
)
from .scalednum import ScaledComplex, as_mpc, format_real, format_scaled, make_scaled, working_precision
from .volterra import VolterraSolution, solve_backward

DEFAULT_N = 10**4
CRITICAL_CELLS = (Cell.CRITICAL_SINGULAR_SUB, Cell.CRITICAL_SINGULAR_SUPER)


@dataclass(frozen=True, eq=False)
class JostSolution:
    model: CoefficientModel
    z: mpc
    f: SolutionSeq
    u: VolterraSolution
    ansatz: Ansatz
    kernel: KernelData
    omega_raw: mpc
    classification: Classification | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def omega(self) -> ScaledComplex:
        with working_precision(self.f.bits):
            return make_scaled(self.omega_raw)

    @property
    def bits(self) -> int:
        return self.f.bits

    def __getitem__(self, n: int) -> mpc:
        return self.f[n]


def _pick_variant(model: CoefficientModel, variant, z):
    if variant is not None:
        return AnsatzVariant(variant), None
    cls = classify(model)
    if cls.cell in CRITICAL_CELLS:
        return AnsatzVariant.CRITICAL_SINGULAR, cls
    raise DomainError(
        f"Jost solutions are implemented for the critical singular cells; this model is {cls.cell.label}"
    )


def jost_solution(
    model: CoefficientModel,
    z=0,
    tol: float = 1e-20,
    N: int | None = None,
    *,
    variant=None,
    tail: str | None = None,
    bits: int | None = None,
    M: int | None = None,
) -> JostSolution:
    """Jost solution f_{-1..M+1}(z) with f_n = Q_n u_n(z) and Omega(z) = -f_{-1}/2.

    ``N`` is the kernel horizon; in the default asymptotic-tail mode the
    truncation index M equals N. ``variant`` selects a zero-diagonal Ansatz
    for b = 0 models (solved with the majorant-controlled unit tail).
    """
    N = DEFAULT_N if N is None else int(N)
    variant, cls = _pick_variant(model, variant, z)
    bits = bits or default_bits(model, N)
    with working_precision(bits):
        z = as_mpc(z)
    ans = build_ansatz(model, variant, z=z, bits=bits, classification=cls)
    k = kernel(model, ans, z, N)
    sol = solve_backward(k, tol=tol, tail=tail, M=M)
    Mt = sol.M
    with working_precision(bits):
        fM = ans.Q_raw(Mt) * sol.u[Mt]
        fM1 = ans.Q_raw(Mt + 1) * sol.u[Mt + 1]
    f = backward_solution(model, z, (fM, fM1), Mt, bits=bits, meta="jost")
    with working_precision(bits):
        omega = -f[-1] / 2
        # f_n / Q_n against u_n on a sample of indices
        worst = mpfr(0)
        for n in sorted({0, 1, 2, Mt // 3, Mt // 2, Mt}):
            q = ans.Q_raw(n)
            worst = max(worst, abs(f[n] / q - sol.u[n]) / max(abs(sol.u[n]), mpfr(1)))
        P = forward_polynomials(model, z, 1, bits=bits)
        w0 = wronskian_raw(model, P, f, 0)
        wm = wronskian_raw(model, P, f, -1)
        om_dev = max(abs(w0 - omega), abs(wm - omega)) / max(abs(omega), mpfr(2) ** (-bits))
    diag = {
        "M": Mt,
        "tail_mode": sol.tail_mode,
        "tail_bound": sol.tail_bound,
        "u_consistency": float(worst),
        "omega_wronskian_deviation": float(om_dev),
        "warnings": list(sol.warnings),
    }
    return JostSolution(model, z, f, sol, ans, k, omega, cls, diag)


def conjugate_jost(js: JostSolution, tol: float = 1e-20) -> SolutionSeq:
    """f~_n(z) = conj(f_n(conj z)): the second Jost solution, a solution at z."""
    with working_precision(js.bits):
        zc = js.z.conjugate()
    if zc == js.z:
        return js.f.conjugate(meta="conjugate")
    other = jost_solution(
        js.model,
        zc,
        tol=tol,
        N=js.kernel.N,
        variant=js.ansatz.variant,
        tail=js.u.tail_mode,
        bits=js.bits,
        M=js.u.M,
    )
    return other.f.conjugate(meta="conjugate")


def _wronskian_spread(model, F: SolutionSeq, G: SolutionSeq, idx) -> tuple[mpc, float]:
    vals = [wronskian_raw(model, F, G, n) for n in idx]
    ref = vals[0]
    scale = max(abs(v) for v in vals)
    if scale == 0:
        return ref, 0.0
    return ref, float(max(abs(v - ref) for v in vals) / scale)


def expected_pair_wronskian(cls: Classification) -> mpc:
    """2 i nu sqrt|tau|."""
    return mpc(0, 2 * cls.nu * gmpy2.sqrt(mpfr(gmpy2.mpq(abs(cls.tau.numerator), cls.tau.denominator))))


def wronskian_pair_check(js: JostSolution, f_tilde: SolutionSeq, rtol: float = 1e-8) -> dict:
    """W[f, f~] at several indices against 2 i nu sqrt|tau| (tau < 0 only)."""
    cls = js.classification or classify(js.model)
    if cls.tau >= 0:
        raise DomainError("for tau >= 0 the conjugate solution coincides with f; their Wronskian vanishes")
    if f_tilde.z != js.z:
        raise DomainError("f and f~ must be solutions at the same z")
    end = min(js.f.end, f_tilde.end) - 1
    idx = sorted({-1, 0, 17, end // 2, end})
    with working_precision(js.bits):
        W, spread = _wronskian_spread(js.model, js.f, f_tilde, idx)
        target = expected_pair_wronskian(cls)
        rel = float(abs(W - target) / abs(W))
        scaled = float(abs(W - target) / abs(target))
    report = {
        "W": [float(W.real), float(W.imag)],
        "expected": [float(target.real), float(target.imag)],
        "relative_deviation": rel,
        "deviation_over_2sqrt_abs_tau": scaled,
        "constancy_spread": spread,
        "indices": idx,
    }
    if rel > rtol:
        raise VerificationError(f"W[f, f~] = {complex(W)} differs from 2i nu sqrt|tau| = {complex(target)} (rel {rel:.3e})")
    return report


class ConstantsMethod(str, enum.Enum):
    WRONSKIAN_SYSTEM = "WronskianSystem"
    JOST_FUNCTION = "JostFunction"


@dataclass(frozen=True)
class AsymptoticConstants:
    """Constants in the asymptotics of P_n(z).

    tau < 0: P = kappa_plus f + kappa_minus f~.
    tau > 0: P = omega_coef f - Omega g. ``kappa`` is -Omega; the coefficient
    of nu^n n^s e^{2 sqrt(tau n)} in P_n is ``kappa_leading`` = -nu Omega / (2 sqrt tau),
    since g_n ~ nu^{n+1} n^s e^{2 sqrt(tau n)} / (2 sqrt tau).
    """

    method: ConstantsMethod
    kappa_plus: mpc | None = None
    kappa_minus: mpc | None = None
    kappa: mpc | None = None
    kappa_leading: mpc | None = None
    omega_coef: mpc | None = None
    basis_wronskian: mpc | None = None

    def as_dict(self) -> dict:
        out = {"method": self.method.value}
        for name in ("kappa_plus", "kappa_minus", "kappa", "kappa_leading", "omega_coef", "basis_wronskian"):
            v = getattr(self, name)
            if v is not None:
                out[name] = _cjson(v)
        return out


def _cjson(v) -> dict:
    v = as_mpc(v)
    if v == 0:
        return {"re": "0", "im": "0", "scaled": "(0)·10^0"}
    return {"re": format_real(v.real, 31), "im": format_real(v.imag, 31), "scaled": format_scaled(v)}


def asymptotic_constants(
    model: CoefficientModel,
    z,
    f: JostSolution,
    partner: SolutionSeq | None = None,
    P: SolutionSeq | None = None,
    n: int = 0,
) -> AsymptoticConstants:
    """kappa_+-, or kappa and omega, from Wronskians evaluated at index ``n``."""
    cls = f.classification or classify(model)
    bits = f.bits
    with working_precision(bits):
        z = as_mpc(z)
        if z != f.z:
            raise DomainError("z does not match the Jost solution")
        if P is None:
            P = forward_polynomials(model, z, max(n + 1, 1), bits=bits)
        if partner is None:
            partner = conjugate_jost(f) if cls.tau < 0 else second_solution(model, f.f)
        Wb = wronskian_raw(model, f.f, partner, n)
        if abs(Wb) < gmpy2.mul_2exp(mpfr(1), -(bits // 4)):
            raise DomainError("degenerate basis: W[f, partner] is numerically zero")
        if cls.tau < 0:
            kp = wronskian_raw(model, P, partner, n) / Wb
            km = -wronskian_raw(model, P, f.f, n) / Wb
            return AsymptoticConstants(ConstantsMethod.WRONSKIAN_SYSTEM, kappa_plus=kp, kappa_minus=km, basis_wronskian=Wb)
        Om = f.omega_raw
        om = wronskian_raw(model, P, partner, n) / Wb
        root = gmpy2.sqrt(mpfr(gmpy2.mpq(cls.tau.numerator, cls.tau.denominator)))
        lead = -cls.nu * Om / (2 * root)
        return AsymptoticConstants(
            ConstantsMethod.JOST_FUNCTION, kappa=-Om, kappa_leading=lead, omega_coef=om, basis_wronskian=Wb
        )


def reconstruction_error(
    model: CoefficientModel,
    P: SolutionSeq,
    f: SolutionSeq,
    partner: SolutionSeq,
    consts: AsymptoticConstants,
    ns,
) -> np.ndarray:
    """|P_n - (combination of f and partner)| / |P_n| at the indices ``ns``."""
    out = []
    bits = max(P.bits, f.bits)
    with working_precision(bits):
        for n in ns:
            if consts.method is ConstantsMethod.WRONSKIAN_SYSTEM:
                rec = consts.kappa_plus * f[n] + consts.kappa_minus * partner[n]
            else:
                rec = consts.omega_coef * f[n] + consts.kappa * partner[n]
            out.append(float(abs(P[n] - rec) / abs(P[n])))
    return np.array(out)


def _slope(ns, vals) -> float | None:
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(vals, dtype=float)
    keep = vals > 0
    if keep.sum() < 2:
        return None
    return float(np.polyfit(np.log(ns[keep]), np.log(vals[keep]), 1)[0])


def fit_exponents(js: JostSolution, lo: int = 100) -> dict:
    """Log-log slopes of |u_n - 1| and |r_n| over [lo, M]."""
    M = js.u.M
    ns = np.unique(np.geomspace(max(lo, 2), M, 40).astype(int))
    with working_precision(js.bits):
        du = [float(abs(js.u[n] - 1)) for n in ns]
        rr = [float(abs(js.kernel.r[n])) for n in ns]
    return {"u_decay": _slope(ns, du), "remainder_decay": _slope(ns, rr), "window": [int(ns[0]), int(ns[-1])]}


def jost_report(js: JostSolution, consts: AsymptoticConstants | None = None, residual_window: int = 2000) -> dict:
    """JSON-ready summary: z, tau, Omega, constants, fitted exponents and residuals."""
    cls = js.classification
    rr = recurrence_residual(js.model, js.f, 0, min(js.f.end - 1, residual_window))
    out = {
        "z": [float(js.z.real), float(js.z.imag)],
        "tau": str(cls.tau) if cls is not None else None,
        "ansatz": js.ansatz.describe(),
        "omega": format_scaled(js.omega),
        "omega_value": _cjson(js.omega_raw),
        "fit_exponents": fit_exponents(js),
        "residuals": {
            "recurrence": rr,
            "u_consistency": js.diagnostics["u_consistency"],
            "omega_wronskian_deviation": js.diagnostics["omega_wronskian_deviation"],
            "tail_bound": js.u.tail_bound,
        },
        "M": js.u.M,
        "tail_mode": js.u.tail_mode,
    }
    if consts is not None:
        c = consts.as_dict()
        out["kappa_plus"] = c.get("kappa_plus")
        out["kappa_minus"] = c.get("kappa_minus")
        out["constants"] = c
    return out


def leading_profile(cls: Classification, n: int, bits: int) -> mpfr:
    """log of |n^s e^{-Re phi_n}|, the modulus of the Ansatz for the critical case."""
    with working_precision(bits):
        s = mpfr(gmpy2.mpq(cls.s.numerator, cls.s.denominator))
        lg = s * gmpy2.log(mpfr(n))
        if cls.tau > 0:
            lg -= 2 * gmpy2.sqrt(mpfr(gmpy2.mpq(cls.tau.numerator, cls.tau.denominator)) * n)
        return lg


def log_abs(x) -> float:
    return float(gmpy2.log(abs(as_mpc(x))))
