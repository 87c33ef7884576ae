"""Solving u_n = 1 + sum_{m>n} G_{n,m} R_m u_m.

The production path is the O(M) backward suffix recursion

    u_n = u_{n+1} + S_n / X_n,    S_{n-1} = S_n + X_{n-1} R_n u_n,

which follows from u_{n+1} - u_n = -X_n^{-1} sum_{m>n} X_{m-1} R_m u_m.
The infinite tail beyond the truncation index M is handled in one of two ways:

``"unit"``
    u_m = 1 for m > M (S_M = 0), with M the first index where the a-priori
    bound e^{H_M} - 1 falls below the tolerance.
``"asymptotic"``
    u_m for m >= M is replaced by a generalized power series
    1 + sum_k d_k (M/m)^{e_k} fitted to the difference equation by least
    squares collocation on [M, ~10^4 M]. The neglected tail then shrinks like
    a high power of 1/M instead of M^{-1/2}, so tolerances such as 1e-20 are
    reachable at M of a few thousand. Only the critical Ansatz supports it.

A successive-approximation series with the direct double-sum G serves as an
independent oracle on small windows.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpc, mpfr

from . import kernels
from .ansatz import AnsatzVariant, KernelData, local_terms, majorant_profile
from .errors import DomainError, HorizonError
from .scalednum import format_real, working_precision

TAIL_MODES = ("asymptotic", "unit")


@dataclass(frozen=True, eq=False)
class VolterraSolution:
    """u_0..u_{M+1}, the truncation index and an estimate of the truncation error."""

    u: list
    M: int
    tail_bound: float
    z: mpc
    tail_mode: str
    bits: int
    H: np.ndarray | None = None
    tail_info: dict = field(default_factory=dict)
    iterations_oracle: list | None = None
    warnings: tuple = ()

    def __getitem__(self, n: int) -> mpc:
        return self.u[n]

    def report(self, n_samples: int = 16, fixed_point_residual: float | None = None) -> dict:
        idx = sorted({int(round(x)) for x in np.geomspace(1, self.M, n_samples)} | {0})
        return {
            "M": self.M,
            "tail_mode": self.tail_mode,
            "tail_bound": self.tail_bound,
            "max_fixed_point_residual": fixed_point_residual,
            "samples": [
                {"n": n, "u_re": format_real(self.u[n].real, 26), "u_im": format_real(self.u[n].imag, 26)} for n in idx
            ],
        }


# ----------------------------------------------------------------------
# asymptotic tail model


def tail_exponents(sigma: Fraction, e_max: Fraction, limit: int = 48) -> list:
    """Exponents j (sigma - 3/2) + k/2 (j, k >= 0, not both 0) up to e_max."""
    rho = sigma - Fraction(3, 2)
    out = set()
    j = 0
    while j * rho <= e_max:
        k = 0
        while j * rho + Fraction(k, 2) <= e_max:
            e = j * rho + Fraction(k, 2)
            if e > 0:
                out.add(e)
            k += 1
        j += 1
        if rho <= 0:
            break
    return sorted(out)[:limit]


def _mpf_exact(x: mpfr):
    if x == 0:
        return mpmath.mpf(0)
    man, exp = x.as_mantissa_exp()
    return mpmath.mpf((int(man), int(exp)))


def _to_mpm(x: mpc):
    return mpmath.mpc(_mpf_exact(x.real), _mpf_exact(x.imag))


def _mpfr_exact(x) -> mpfr:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return mpfr(0)
    v = gmpy2.mul_2exp(mpfr(gmpy2.mpz(man)), int(exp))
    return -v if sign else v


def _from_mpm(x) -> mpc:
    return mpc(_mpfr_exact(x.real), _mpfr_exact(x.imag))


def _fit_tail(k: KernelData, M: int, exps: list, bits: int):
    """Least-squares collocation of the u-equation by 1 + sum d_j (M/n)^{e_j}."""
    K = len(exps)
    npts = 2 * K + 8
    # nodes n = M / w^4 with w Chebyshev-distributed in (0, 1)
    with mpmath.workprec(bits):
        ws = [mpmath.cos(mpmath.pi * (i + mpmath.mpf(1) / 2) / (2 * npts)) for i in range(npts)]
        nodes = sorted({int(M / w**4) for w in ws})
    rows, rhs = [], []
    with working_precision(bits):
        ee = [mpfr(gmpy2.mpq(e.numerator, e.denominator)) for e in exps]
        Mf = mpfr(M)
        for n in nodes:
            lam, R = local_terms(k.model, k.ansatz, k.z, n)
            row = []
            for e in ee:
                p0 = (Mf / (n - 1)) ** e
                p1 = (Mf / n) ** e
                p2 = (Mf / (n + 1)) ** e
                row.append(lam * (p2 - p1) - (p1 - p0) - R * p1)
            scale = max(abs(v) for v in row)
            rows.append([v / scale for v in row])
            rhs.append(R / scale)
    with mpmath.workprec(bits), working_precision(bits):
        A = mpmath.matrix([[_to_mpm(v) for v in row] for row in rows])
        b = mpmath.matrix([_to_mpm(v) for v in rhs])
        d, res = mpmath.qr_solve(A, b)
        coef = [_from_mpm(d[i]) for i in range(K)]
        resid = float(res)
    return coef, resid


def _eval_tail(coef, exps, M: int, n: int) -> mpc:
    Mf = mpfr(M)
    acc = mpc(1)
    for c, e in zip(coef, exps):
        acc += c * (Mf / n) ** mpfr(gmpy2.mpq(e.numerator, e.denominator))
    return acc


def asymptotic_tail(k: KernelData, M: int, tol: float):
    """Tail values (u_M, u_{M+1}), an error estimate and fit details."""
    cls = k.ansatz.classification
    sigma = cls.sigma
    bits = k.bits
    # enough exponents that M^{-e_max} sits well below tol
    need = math.log(1.0 / max(tol, 1e-300)) / math.log(M) + 1.0
    step = Fraction(1, 4) if (sigma - Fraction(3, 2)).denominator > 2 else Fraction(1, 2)
    e_max = Fraction(math.ceil(need / float(step))) * step
    exps = tail_exponents(sigma, e_max)
    coef, resid = _fit_tail(k, M, exps, bits)
    lower = [e for e in exps if e <= e_max - 1]
    with working_precision(bits):
        uM = _eval_tail(coef, exps, M, M)
        uM1 = _eval_tail(coef, exps, M, M + 1)
        if lower:
            coef2, _ = _fit_tail(k, M, lower, bits)
            uM_low = _eval_tail(coef2, lower, M, M)
            est = float(abs(uM - uM_low))
        else:
            est = float(abs(uM - 1))
    info = {
        "exponents": [str(e) for e in exps],
        "coefficients_head": [[float(c.real), float(c.imag)] for c in coef[:4]],
        "collocation_residual": resid,
        "lower_order_difference": est,
    }
    return uM, uM1, est, info


# ----------------------------------------------------------------------


def solve_backward(
    k: KernelData,
    majorant=None,
    tol: float = 1e-20,
    tail: str | None = None,
    M: int | None = None,
) -> VolterraSolution:
    """Backward suffix recursion for u; see the module docstring for ``tail``."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    crit = k.ansatz.variant is AnsatzVariant.CRITICAL_SINGULAR
    if tail is None:
        tail = "asymptotic" if crit else "unit"
    if tail not in TAIL_MODES:
        raise DomainError(f"tail mode must be one of {TAIL_MODES}")
    if tail == "asymptotic" and not crit:
        raise DomainError("the asymptotic tail needs the critical Ansatz")
    bits = k.bits
    warnings = []
    H = None
    info = {}
    if tail == "unit":
        if majorant is None:
            h, H, minfo = majorant_profile(k, k.N)
        else:
            h, H, minfo = majorant
        if minfo["warning"]:
            warnings.append(minfo["warning"])
        bounds = np.expm1(H)
        if M is None:
            ok = np.nonzero(bounds[: k.N] <= tol)[0]
            if len(ok) == 0:
                raise HorizonError(
                    f"no truncation index within the horizon N={k.N} meets tol={tol:g}; "
                    f"smallest bound e^H - 1 = {float(bounds[: k.N].min()):.3e}",
                    best_bound=float(bounds[: k.N].min()),
                )
            M = int(ok[0])
        if M > k.N:
            raise DomainError("M beyond the kernel horizon")
        tail_bound = float(bounds[M])
        info = {k_: minfo[k_] for k_ in ("tail", "fitted_exponent", "exponent", "amplitude", "reliable")}
        with working_precision(bits):
            u_next, S = mpc(1), mpc(0)
    else:
        M = k.N if M is None else M
        if M > k.N:
            raise DomainError("M beyond the kernel horizon")
        uM, uM1, tail_bound, info = asymptotic_tail(k, M, tol)
        if tail_bound > tol:
            raise HorizonError(
                f"asymptotic tail at M={M} estimated at {tail_bound:.3e} > tol={tol:g}; raise N",
                best_bound=tail_bound,
            )
        with working_precision(bits):
            u_next = uM1
            S = k.X[M] * (uM - uM1)
    with working_precision(bits):
        u = kernels.volterra_suffix(k.X, k.R, u_next, S, M)
    return VolterraSolution(u, M, tail_bound, k.z, tail, bits, H, info, None, tuple(warnings))


def fixed_point_residual(k: KernelData, sol: VolterraSolution, samples=32, seed: int = 0) -> float:
    """max over sampled n of |u_n - u_{M+1} - S_M sum_{p=n}^{M} 1/X_p - sum_{m=n+1}^{M} G_{n,m} R_m u_m|.

    G is accumulated from its double-sum definition, independently of the
    suffix recursion. For the unit tail (u_{M+1} = 1, S_M = 0) this is the
    truncated Volterra equation itself.
    """
    M = sol.M
    if isinstance(samples, int):
        rng = random.Random(seed)
        idx = sorted(rng.sample(range(0, M), min(samples, M)))
    else:
        idx = list(samples)
    worst = mpfr(0)
    with working_precision(sol.bits):
        S_M = k.X[M] * (sol.u[M] - sol.u[M + 1])
        for n in idx:
            inner = mpc(0)
            acc = mpc(0)
            for m in range(n + 1, M + 1):
                inner += 1 / k.X[m - 1]
                acc += k.X[m - 1] * inner * k.R[m] * sol.u[m]
            inv_sum = inner + 1 / k.X[M]
            res = sol.u[n] - sol.u[M + 1] - S_M * inv_sum - acc
            worst = max(worst, abs(res))
    return float(worst)


@dataclass(frozen=True)
class SeriesResult:
    partial_sums: list  # partial_sums[K][n] = sum_{k<=K} u^{(k)}_n
    terms_max: list  # max_n |u^{(k)}_n| per k
    H: np.ndarray
    bound_violations: list
    N_window: int


SERIES_COST_CAP = 2.5e7


def solve_series(k: KernelData, K: int, N_window: int) -> SeriesResult:
    """Successive approximations u^{(k+1)}_n = sum_{n<m<=N} G_{n,m} R_m u^{(k)}_m.

    The sum is truncated at the window end, which matches ``solve_backward``
    with the unit tail at M = N_window. The bound |u^{(k)}_n| <= H_n^k / k!
    is checked with H_n = sum_{p=n+1}^{N_window} h_p.
    """
    if K < 1:
        raise DomainError("K must be at least 1")
    if N_window > k.N:
        raise DomainError("window exceeds the kernel horizon")
    cost = K * N_window**2
    if cost > SERIES_COST_CAP:
        raise DomainError(f"series oracle cost {cost:.2e} exceeds cap {SERIES_COST_CAP:.1e}")
    h = k.h(N_window)[: N_window + 1]
    H = np.concatenate([np.cumsum(h[::-1])[::-1][1:], [0.0]])
    with working_precision(k.bits):
        # T[n][m - n - 1] = G_{n,m} R_m for n < m <= N, G from its double sum
        T = []
        for n in range(0, N_window + 1):
            inner = mpc(0)
            row = []
            for m in range(n + 1, N_window + 1):
                inner += 1 / k.X[m - 1]
                row.append(k.X[m - 1] * inner * k.R[m])
            T.append(row)
        term = [mpc(1)] * (N_window + 1)
        total = list(term)
        partial = [list(total)]
        tmax = [1.0]
        violations = []
        for it in range(1, K + 1):
            nxt = []
            for n in range(0, N_window + 1):
                acc = mpc(0)
                row = T[n]
                for j, t in enumerate(row):
                    acc += t * term[n + 1 + j]
                nxt.append(acc)
            term = nxt
            total = [a + b for a, b in zip(total, term)]
            partial.append(list(total))
            mags = [float(abs(v)) for v in term]
            tmax.append(max(mags))
            fact = math.factorial(it)
            for n in range(0, N_window + 1):
                bound = H[n] ** it / fact
                if mags[n] > bound * (1 + 1e-9) + 1e-300:
                    violations.append((it, n, mags[n], bound))
    return SeriesResult(partial, tmax, H, violations, N_window)
