"""Discrete spectrum: Jost-function zeros, finite sections, weights, l2 probes.

For tau > 0 the Jost solution is recessive as n grows, so running the
recurrence backwards from the Ansatz values (Q_M, Q_{M+1}) reproduces it up
to a smooth positive normalization c(z) = 1 + O(M^{-1/2}) plus a contamination
of relative size e^{-4 sqrt(tau M)}. The normalization moves neither the zeros
of Omega nor the ratio 2 f_0 / f'_{-1}, so this cheap evaluation is what the
zero scan and the weight formula use. ``omega_volterra`` gives the properly
normalized value when it is needed.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from . import kernels
from .coeffs import Cell, Classification, CoefficientModel, classify
from .errors import DomainError, UnresolvedSpectrumError
from .recurrence import (
    A_MINUS_ONE,
    SolutionSeq,
    backward_solution,
    default_bits,
    forward_polynomials,
)
from .scalednum import as_mpc, format_real, working_precision

DEFAULT_BITS = 256


class Method(str, enum.Enum):
    JOST_ZERO = "JostZero"
    TRUNCATION = "Truncation"


@dataclass
class Eigenvalue:
    lam: float
    width: float
    value: mpfr | None = None  # refined high-precision location, when available
    w_jost: float | None = None
    w_sum: float | None = None
    flags: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {"lambda": self.lam, "width": self.width, "w_jost": self.w_jost, "w_sum": self.w_sum}
        if self.value is not None:
            out["lambda_hp"] = format_real(self.value, 40)
        if self.flags:
            out["flags"] = list(self.flags)
        return out


@dataclass
class SpectralReport:
    method: Method
    interval: tuple
    eigenvalues: list
    convergence: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def values(self) -> list:
        return [e.lam for e in self.eigenvalues]

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "interval": [float(self.interval[0]), float(self.interval[1])],
            "eigenvalues": [e.as_dict() for e in self.eigenvalues],
            "convergence": self.convergence,
            "info": self.info,
        }


# ----------------------------------------------------------------------
# parallel map


def default_workers() -> int:
    return os.cpu_count() or 1


def _pmap(fn, items, workers: int | None):
    items = list(items)
    if not workers or workers <= 1 or len(items) < 4:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# ----------------------------------------------------------------------
# Jost function


def _require_super(model: CoefficientModel) -> Classification:
    cls = classify(model)
    if cls.cell is not Cell.CRITICAL_SINGULAR_SUPER:
        raise DomainError(f"needs the critical singular cell with tau > 0; model is {cls.cell.label}")
    return cls


def cheap_horizon(cls: Classification, bits: int, z=0) -> int:
    """M with e^{-4 sqrt(tau M)} below 2^-bits, plus room for the oscillatory zone of large |z|."""
    tau = float(cls.tau)
    m0 = (bits * math.log(2) + 10) / (4 * math.sqrt(tau))
    reach = 2 * (1 + abs(complex(z))) ** (1 / float(cls.sigma))
    return int(math.ceil(m0 * m0 + reach)) + 16


def _ansatz_pair(cls: Classification, M: int):
    s = mpfr(gmpy2.mpq(cls.s.numerator, cls.s.denominator))
    root = 2 * gmpy2.sqrt(mpfr(gmpy2.mpq(cls.tau.numerator, cls.tau.denominator)))
    out = []
    for n in (M, M + 1):
        v = mpfr(n) ** s * gmpy2.exp(-root * gmpy2.sqrt(mpfr(n)))
        out.append(mpc(-v if (cls.nu < 0 and n % 2) else v))
    return out


def jost_tail_solution(model: CoefficientModel, z, bits: int | None = None, M: int | None = None, cls=None) -> SolutionSeq:
    """Backward solution from Ansatz tail values; a multiple c(z) of the Jost solution (tau > 0)."""
    cls = cls or _require_super(model)
    bits = bits or default_bits(model, 1000)
    with working_precision(bits):
        z = as_mpc(z)
        M = M or cheap_horizon(cls, bits, z)
        fM, fM1 = _ansatz_pair(cls, M)
    return backward_solution(model, z, (fM, fM1), M, bits=bits, meta="jost")


def jost_function(model: CoefficientModel, z, bits: int | None = None, M: int | None = None, cls=None) -> mpc:
    """-f_{-1}(z)/2 for the tail-started Jost solution (zeros equal those of Omega)."""
    f = jost_tail_solution(model, z, bits, M, cls)
    with working_precision(f.bits):
        return -f[-1] / 2


def omega_volterra(model: CoefficientModel, z, tol: float = 1e-20, N: int = 2000) -> mpc:
    """Omega(z) with the Volterra-normalized Jost solution."""
    from .jost import jost_solution

    return jost_solution(model, z, tol=tol, N=N).omega_raw


class _OmegaEval:
    """Picklable real-axis evaluator returning Omega(lam) as a real mpfr."""

    def __init__(self, model, bits, M, cls):
        self.model, self.bits, self.M, self.cls = model, bits, M, cls

    def __call__(self, lam):
        with working_precision(self.bits):
            v = jost_function(self.model, mpfr(lam), self.bits, self.M, self.cls)
            return v


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def jost_zero_scan(
    model: CoefficientModel,
    interval,
    grid: int = 64,
    tol: float = 1e-12,
    bits: int | None = None,
    workers: int | None = 1,
    max_doublings: int = 4,
    im_tol: float = 1e-20,
) -> SpectralReport:
    """Real zeros of Omega in ``interval`` by sign changes on a refined grid plus bisection."""
    cls = _require_super(model)
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise DomainError("interval must satisfy lo < hi")
    if grid < 8:
        raise DomainError("grid must be at least 8")
    bits = bits or default_bits(model, 1000)
    M = cheap_horizon(cls, bits, max(abs(lo), abs(hi)))
    ev = _OmegaEval(model, bits, M, cls)
    max_im = 0.0

    def scan(n):
        nonlocal max_im
        xs = np.linspace(lo, hi, n + 1)
        vals = _pmap(ev, xs, workers)
        with working_precision(bits):
            for v in vals:
                if v != 0:
                    max_im = max(max_im, float(abs(v.imag) / abs(v)))
            signs = [_sign(v.real) for v in vals]
        return xs, signs

    def brackets(xs, signs):
        out = []
        for i in range(len(xs) - 1):
            if signs[i] == 0:
                out.append((xs[i], xs[i]))
            elif signs[i] * signs[i + 1] < 0:
                out.append((xs[i], xs[i + 1]))
        if signs[-1] == 0:
            out.append((xs[-1], xs[-1]))
        return out

    history = []
    n = grid
    xs, signs = scan(n)
    br = brackets(xs, signs)
    history.append({"grid": n, "count": len(br)})
    stable = 0
    for _ in range(max_doublings):
        n *= 2
        xs, signs = scan(n)
        br_new = brackets(xs, signs)
        history.append({"grid": n, "count": len(br_new)})
        stable = stable + 1 if len(br_new) == len(br) else 0
        br = br_new
        if stable >= 2:
            break
    if stable < 2:
        raise UnresolvedSpectrumError(
            f"zero count still changing after {max_doublings} grid doublings: {[h['count'] for h in history]}",
            partial=[0.5 * (a + b) for a, b in br],
        )
    # confirmation: 4x finer grid must not reveal extra sign changes
    xs4, signs4 = scan(4 * n)
    br4 = brackets(xs4, signs4)
    confirmed = len(br4) == len(br)
    if max_im > im_tol:
        raise DomainError(f"Omega not real on the real axis: max |Im|/|Omega| = {max_im:.3e}")
    eigs = []
    with working_precision(bits):
        for a, b in br:
            a, b = mpfr(a), mpfr(b)
            if a == b:
                eigs.append(Eigenvalue(float(a), 0.0, a))
                continue
            fa = ev(a).real
            while b - a > tol * max(1.0, abs(float(a))):
                mid = (a + b) / 2
                fm = ev(mid).real
                if fm == 0:
                    a = b = mid
                    break
                if _sign(fm) == _sign(fa):
                    a, fa = mid, fm
                else:
                    b = mid
            eigs.append(Eigenvalue(float((a + b) / 2), float(b - a), (a + b) / 2))
    info = {
        "bits": bits,
        "horizon_M": M,
        "max_im_ratio": max_im,
        "confirmation_grid": 4 * n,
        "confirmed": confirmed,
    }
    rep = SpectralReport(Method.JOST_ZERO, (lo, hi), eigs, history, info)
    if not confirmed:
        rep.info["warning"] = "4x confirmation grid found a different number of sign changes"
    return rep


def refine_zero(model: CoefficientModel, lam, bits: int | None = None, steps: int = 60, cls=None) -> tuple[mpfr, mpfr]:
    """Newton polish of a real zero of Omega; returns (lambda, |Omega'(lambda)|)."""
    cls = cls or _require_super(model)
    bits = bits or default_bits(model, 1000)
    with working_precision(bits):
        x = mpfr(lam)
        M = cheap_horizon(cls, bits, x)
        for _ in range(steps):
            h = _diff_step(x, bits)
            f0 = jost_function(model, x, bits, M, cls).real
            fp = (jost_function(model, x + h, bits, M, cls).real - jost_function(model, x - h, bits, M, cls).real) / (2 * h)
            if fp == 0:
                break
            dx = f0 / fp
            x -= dx
            if abs(dx) <= abs(x) * gmpy2.mul_2exp(mpfr(1), -(bits - 16)) + gmpy2.mul_2exp(mpfr(1), -(bits - 16)):
                break
        return x, abs(fp)


def _diff_step(x, bits: int) -> mpfr:
    return gmpy2.mul_2exp(mpfr(1), -(bits // 3)) * (1 + abs(mpfr(x)))


# ----------------------------------------------------------------------
# finite sections


def _section(model: CoefficientModel, N: int, bits: int | None):
    if bits:
        with working_precision(bits):
            a, b = model.arrays(N)
            return list(b[:N]), [x * x for x in a[: N - 1]]
    with working_precision(max(model.precision, 64)):
        a, b = model.arrays(N)
        return [float(x) for x in b[:N]], [float(x * x) for x in a[: N - 1]]


def _gershgorin(diag, off2):
    N = len(diag)
    lo = hi = None
    for i in range(N):
        r = 0.0
        if i > 0:
            r += math.sqrt(float(off2[i - 1]))
        if i < N - 1:
            r += math.sqrt(float(off2[i]))
        d = float(diag[i])
        lo = d - r if lo is None else min(lo, d - r)
        hi = d + r if hi is None else max(hi, d + r)
    return lo - 1.0, hi + 1.0


def truncated_eigs(
    model: CoefficientModel,
    N: int,
    interval=None,
    rel_width: float = 1e-10,
    bits: int | None = None,
) -> SpectralReport:
    """Eigenvalues of the N x N leading section inside ``interval`` by Sturm bisection.

    With ``bits`` unset the Sturm sequence runs in double precision; with
    ``bits`` it runs in MPFR and ``rel_width`` may go far below 1e-16.
    """
    if N < 1:
        raise DomainError("N must be positive")
    diag, off2 = _section(model, N, bits)
    if interval is None:
        interval = _gershgorin(diag, off2)
    lo, hi = interval
    num = (lambda v: mpfr(v)) if bits else float
    ctx = working_precision(bits) if bits else _nullctx()
    with ctx:
        lo_x, hi_x = num(lo), num(hi)
        c_lo = kernels.sturm_count(diag, off2, lo_x)
        c_hi = kernels.sturm_count(diag, off2, hi_x)
        eigs = []
        # k-th eigenvalue (global index c_lo + j) by bisection on the count
        for j in range(c_hi - c_lo):
            target = c_lo + j + 1
            a, b = lo_x, hi_x
            while True:
                width = b - a
                if width <= rel_width * max(1.0, abs(float(a)), abs(float(b))):
                    break
                mid = (a + b) / 2
                if mid == a or mid == b:
                    break
                if kernels.sturm_count(diag, off2, mid) >= target:
                    b = mid
                else:
                    a = mid
            val = (a + b) / 2
            eigs.append(Eigenvalue(float(val), float(b - a), val if bits else None))
    info = {"N": N, "sturm_count_lo": c_lo, "sturm_count_hi": c_hi, "precision": bits or 53}
    return SpectralReport(Method.TRUNCATION, (lo, hi), eigs, [], info)


class _nullctx:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


def converged_truncation(
    model: CoefficientModel,
    interval,
    N0: int = 16,
    shift_tol: float = 1e-9,
    N_max: int = 4096,
    rel_width: float = 1e-12,
    bits: int | None = None,
) -> SpectralReport:
    """Double N until every eigenvalue in ``interval`` moves by less than ``shift_tol``."""
    N = N0
    prev = truncated_eigs(model, N, interval, rel_width, bits)
    history = [{"N": N, "count": len(prev.eigenvalues), "max_shift": None}]
    while True:
        N *= 2
        if N > N_max:
            raise UnresolvedSpectrumError(f"finite sections not converged by N={N_max}", partial=prev.values)
        cur = truncated_eigs(model, N, interval, rel_width, bits)
        if len(cur.eigenvalues) == len(prev.eigenvalues) and cur.eigenvalues:
            shift = max(abs(a - b) for a, b in zip(cur.values, prev.values))
        elif not cur.eigenvalues and not prev.eigenvalues:
            shift = 0.0
        else:
            shift = math.inf
        history.append({"N": N, "count": len(cur.eigenvalues), "max_shift": shift})
        prev = cur
        if shift < shift_tol:
            break
    prev.convergence = history
    return prev


# ----------------------------------------------------------------------
# weights


def spectral_weights(
    model: CoefficientModel,
    lambda_k,
    N_sum: int = 200,
    bits: int | None = None,
    zero_rtol: float = 1e-8,
    refine: bool = True,
) -> dict:
    """rho({lambda_k}) as 2 f_0 / f'_{-1} and as 1 / sum_{n <= N_sum} P_n^2.

    ``lambda_k`` is first polished by Newton's method at full precision;
    the reciprocal sum needs the zero to nearly full precision because P_n
    picks up the growing solution at the rate Omega(lambda) e^{4 sqrt(tau n)}.
    """
    cls = _require_super(model)
    bits = bits or default_bits(model, 1000)
    with working_precision(bits):
        lam0 = mpfr(lambda_k)
        M = cheap_horizon(cls, bits, lam0)
        h = _diff_step(lam0, bits)
        # is lambda_k a zero to tolerance?
        f_here = jost_function(model, lam0, bits, M, cls).real
        slope = (jost_function(model, lam0 + h, bits, M, cls).real - jost_function(model, lam0 - h, bits, M, cls).real) / (2 * h)
        if slope == 0 or abs(f_here / slope) > zero_rtol * max(1.0, abs(float(lam0))):
            raise DomainError(f"lambda={float(lam0)} is not a zero of Omega to tolerance (offset {float(abs(f_here / slope)):.3e})")
        lam = refine_zero(model, lam0, bits, cls=cls)[0] if refine else lam0
        h = _diff_step(lam, bits)
        f = jost_tail_solution(model, lam, bits, M, cls)
        fp = jost_tail_solution(model, lam + h, bits, M, cls)
        fm = jost_tail_solution(model, lam - h, bits, M, cls)
        fdot = (fp[-1] - fm[-1]).real / (2 * h)
        w_jost = 2 * f[0].real / fdot
        P = forward_polynomials(model, lam, N_sum, bits=bits)
        tot = mpfr(0)
        for n in range(0, N_sum + 1):
            tot += P[n].real ** 2
        w_sum = 1 / tot
        P_last = float(abs(P[N_sum].real))
        # the discarded tail of the sum decays like P_n^2; estimate from the last terms
        tail_est = float(P[N_sum].real ** 2 / tot)
    w_j, w_s = float(w_jost), float(w_sum)
    disagreement = abs(w_j - w_s) / max(abs(w_j), abs(w_s))
    return {
        "lambda": float(lam),
        "lambda_hp": format_real(lam, 40),
        "w_jost": w_j,
        "w_sum": w_s,
        "relative_disagreement": disagreement,
        "sum_tail_estimate": tail_est,
        "last_P": P_last,
        "N_sum": N_sum,
        "step": float(h),
        "positive": w_j > 0 and w_s > 0,
    }


# ----------------------------------------------------------------------
# deficiency probe


def second_kind(model: CoefficientModel, z, N: int, bits: int | None = None) -> SolutionSeq:
    """Solution with f_{-1} = 1, f_0 = 0; independent of P (W[P, f] = -1/2)."""
    bits = bits or default_bits(model, N)
    with working_precision(bits):
        z = as_mpc(z)
        a, b = model.arrays(N)
        p0, p1 = mpc(1), mpc(0)
        rest = kernels.forward_recurrence(a, b, z, p0, p1, A_MINUS_ONE, N)
        return SolutionSeq(-1, [p0, p1] + rest, z, "custom", bits)


def _partial_norms(F: SolutionSeq, checkpoints, bits: int):
    out = []
    acc = mpfr(0)
    with working_precision(bits):
        idx = 0
        for n in range(0, checkpoints[-1] + 1):
            acc += gmpy2.norm(F[n])
            if n == checkpoints[idx]:
                out.append(acc)
                idx += 1
    return out


def deficiency_probe(
    model: CoefficientModel,
    z=1j,
    N: int = 20000,
    levels: int = 4,
    tol: float = 1e-20,
    bits: int | None = None,
) -> dict:
    """Partial l2 norms of P and of a second solution at doubling N (numerical evidence only).

    The second solution is the Jost solution in the critical singular cells
    and the second-kind solution (f_{-1} = 1, f_0 = 0) otherwise.
    """
    with working_precision(64):
        zc = as_mpc(z)
    if zc.imag == 0:
        raise DomainError("deficiency probe needs Im z != 0")
    cls = None
    try:
        cls = classify(model)
    except Exception:
        cls = None
    zero_diag = model.zero_diagonal
    if cls is not None and cls.cell in (Cell.CRITICAL_SINGULAR_SUB, Cell.CRITICAL_SINGULAR_SUPER):
        from .jost import jost_solution

        js = jost_solution(model, z, tol=tol, N=N, bits=bits)
        F = js.f
        label = "jost"
    elif zero_diag or cls is not None:
        F = second_kind(model, z, N, bits)
        label = "second_kind"
    else:
        raise DomainError("deficiency probe supports the critical singular cells and zero-diagonal models")
    bits = F.bits
    P = forward_polynomials(model, z, N, bits=bits)
    checkpoints = sorted({max(1, N >> (levels - 1 - i)) for i in range(levels)})
    nP = _partial_norms(P, checkpoints, bits)
    nF = _partial_norms(F, checkpoints, bits)

    def summarize(norms):
        rows = []
        with working_precision(bits):
            for i, (n, v) in enumerate(zip(checkpoints, norms)):
                inc = None if i == 0 else float((v - norms[i - 1]) / v)
                rows.append({"N": n, "log10_norm2": float(gmpy2.log10(v)), "relative_increment": inc})
        return rows

    rowsP, rowsF = summarize(nP), summarize(nF)

    def tail_exponent(S: SolutionSeq):
        ns = np.unique(np.geomspace(max(10, N // 8), N, 24).astype(int))
        with working_precision(bits):
            # |S_n|^2 averaged over a short window to smooth oscillation
            ys = []
            for n in ns:
                w = max(1, n // 50)
                ys.append(float(gmpy2.log(sum(gmpy2.norm(S[m]) for m in range(n - w, n + 1)) / (w + 1))))
        slope = float(np.polyfit(np.log(ns), ys, 1)[0])
        curvature = float(np.polyfit(np.sqrt(ns), ys, 1)[0])
        return slope, curvature

    sP, cP = tail_exponent(P)
    sF, cF = tail_exponent(F)

    def verdict(slope, curv, rows):
        if curv > 0.5 or slope > 1:
            return "diverges"
        if slope < -1:
            return "saturates"
        return "inconclusive"

    vP, vF = verdict(sP, cP, rowsP), verdict(sF, cF, rowsF)
    if vP == "saturates" and vF == "saturates":
        conclusion = "both solutions appear square summable: evidence for deficiency indices (1,1)"
    elif vP == "diverges":
        conclusion = "P is not square summable: evidence for deficiency indices (0,0)"
    else:
        conclusion = "inconclusive"
    return {
        "evidence": "numerical evidence, not a proof",
        "z": [float(zc.real), float(zc.imag)],
        "second_solution": label,
        "P": {"partial_norms": rowsP, "tail_power": sP, "sqrt_n_rate": cP, "verdict": vP},
        "F": {"partial_norms": rowsF, "tail_power": sF, "sqrt_n_rate": cF, "verdict": vF},
        "conclusion": conclusion,
    }


# ----------------------------------------------------------------------
# resolvent


def resolvent_matrix(model: CoefficientModel, z, n_max: int = 8, f: SolutionSeq | None = None, bits: int | None = None):
    """R_{n,m} = P_min(n,m) f_max(n,m) / Omega, n, m <= n_max, with Omega = W[P, f]."""
    cls = classify(model)
    if f is None:
        if cls.tau > 0:
            f = jost_tail_solution(model, z, bits, cls=cls)
        else:
            from .jost import jost_solution

            f = jost_solution(model, z, N=2000, bits=bits).f
    bits = f.bits
    with working_precision(bits):
        P = forward_polynomials(model, z, n_max + 1, bits=bits)
        Om = -f[-1] / 2
        R = [[P[min(n, m)] * f[max(n, m)] / Om for m in range(n_max + 2)] for n in range(n_max + 2)]
    return R, P, f, Om


def tridiagonal_solve(model: CoefficientModel, z, N: int, rhs_index: int, bits: int) -> list:
    """x = (J_N - z)^{-1} e_k for the N x N section, by the Thomas algorithm."""
    with working_precision(bits):
        z = as_mpc(z)
        a, b = model.arrays(N)
        diag = [b[i] - z for i in range(N)]
        off = [a[i] for i in range(N - 1)]
        rhs = [mpc(1) if i == rhs_index else mpc(0) for i in range(N)]
        c = [mpc(0)] * N
        d = [mpc(0)] * N
        c[0] = off[0] / diag[0] if N > 1 else mpc(0)
        d[0] = rhs[0] / diag[0]
        for i in range(1, N):
            den = diag[i] - off[i - 1] * c[i - 1]
            c[i] = off[i] / den if i < N - 1 else mpc(0)
            d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / den
        x = [mpc(0)] * N
        x[-1] = d[-1]
        for i in range(N - 2, -1, -1):
            x[i] = d[i] - c[i] * x[i + 1]
        return x


def resolvent_check(model: CoefficientModel, z, n_max: int = 8, N_section: int = 400, bits: int | None = None) -> dict:
    """Symmetry, equation residual and (tau > 0) finite-section agreement of the resolvent kernel."""
    with working_precision(64):
        if as_mpc(z).imag == 0:
            raise DomainError("resolvent check needs Im z != 0")
    R, P, f, Om = resolvent_matrix(model, z, n_max, bits=bits)
    bits = f.bits
    cls = classify(model)
    with working_precision(bits):
        zc = as_mpc(z)
        a, b = model.arrays(n_max + 3)
        scale = max(abs(R[n][m]) for n in range(n_max + 1) for m in range(n_max + 1))
        sym = max(abs(R[n][m] - R[m][n]) for n in range(n_max + 1) for m in range(n_max + 1)) / scale
        # column m of R must solve (J - z) x = e_m in rows 0..n_max
        res = mpfr(0)
        for m in range(n_max + 1):
            for j in range(n_max + 1):
                lhs = (b[j] - zc) * R[j][m] + a[j] * R[j + 1][m]
                if j > 0:
                    lhs += a[j - 1] * R[j - 1][m]
                res = max(res, abs(lhs - (1 if j == m else 0)))
        section = None
        if cls.tau > 0:
            worst = mpfr(0)
            for m in range(n_max + 1):
                x = tridiagonal_solve(model, zc, N_section, m, bits)
                for n in range(n_max + 1):
                    worst = max(worst, abs(x[n] - R[n][m]) / scale)
            section = float(worst)
    return {
        "symmetry": float(sym),
        "equation_residual": float(res / scale),
        "finite_section_deviation": section,
        "n_max": n_max,
        "omega": [float(Om.real), float(Om.imag)],
    }
