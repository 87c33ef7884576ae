"""Explicit approximate solutions (Ansatz) and the Volterra kernel they induce.

Writing a solution as ``f_n = Q_n u_n`` turns the recurrence into

    Lambda_n (u_{n+1} - u_n) - (u_n - u_{n-1}) = R_n u_n

with ``Lambda_n = (a_n/a_{n-1}) Q_{n+1}/Q_{n-1}`` and
``R_n = -sqrt(a_n/a_{n-1}) (Q_n/Q_{n-1}) r_n``, where ``r_n`` is the relative
defect of ``Q`` in the recurrence. Summing twice gives the Volterra equation
``u_n = 1 + sum_{m>n} G_{n,m} R_m u_m`` with ``G_{n,m} = X_{m-1} sum_{p=n}^{m-1} 1/X_p``
and ``X_n = a_n Q_n Q_{n+1} / (a_0 Q_0 Q_1)``.

Three Ansatz variants are provided:

* critical singular (|gamma| = 1, tau != 0, sigma > 3/2):
  ``Q_n = nu**n n**s exp(-2 sqrt(tau) sqrt(n))`` with ``sqrt(tau) = i sqrt(|tau|)`` for tau < 0;
* zero diagonal, Carleman: ``Q_n = (-+i)**n a_n**(-1/2) exp(+-i z phi_n)``,
  ``phi_n = sum_{m<n} 1/(2 sqrt(a_{m-1} a_m))``;
* zero diagonal, non-Carleman: ``Q_n = (-i)**n a_n**(-1/2)``.

In every variant ``Q_0 = Q_{-1} = 1``.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .coeffs import Classification, CoefficientModel, classify
from .errors import DomainError, UnsupportedError
from .recurrence import A_MINUS_ONE, default_bits
from .scalednum import ScaledComplex, as_mpc, log10_magnitude, make_scaled, working_precision


class AnsatzVariant(str, enum.Enum):
    CRITICAL_SINGULAR = "CriticalSingular"
    ZERO_DIAG_CARLEMAN = "ZeroDiagCarleman"
    ZERO_DIAG_NON_CARLEMAN = "ZeroDiagNonCarleman"


def _q(x: Fraction) -> mpfr:
    return mpfr(gmpy2.mpq(x.numerator, x.denominator))


@dataclass(frozen=True, eq=False)
class Ansatz:
    """Closed-form Q_n together with its phase increments theta_n and phase phi_n."""

    variant: AnsatzVariant
    model: CoefficientModel
    s: Fraction
    nu: int
    bits: int
    sqrt_tau: mpc | None = None
    sign: int = 1
    z: mpc | None = None
    classification: Classification | None = None
    _phi: list = field(default_factory=list, init=False, repr=False)

    # -- phases -------------------------------------------------------
    def theta(self, n: int) -> mpc:
        with working_precision(self.bits):
            if self.variant is AnsatzVariant.CRITICAL_SINGULAR:
                # 2 sqrt(tau) (sqrt(n+1) - sqrt(n)) without the cancellation
                return 2 * self.sqrt_tau / (gmpy2.sqrt(mpfr(n + 1)) + gmpy2.sqrt(mpfr(n)))
            a1 = self.model.a_at(n)
            a0 = A_MINUS_ONE if n == 0 else self.model.a_at(n - 1)
            return mpc(1 / (2 * gmpy2.sqrt(a0 * a1)))

    def phi(self, n: int) -> mpc:
        with working_precision(self.bits):
            if self.variant is AnsatzVariant.CRITICAL_SINGULAR:
                return 2 * self.sqrt_tau * gmpy2.sqrt(mpfr(n))
            if self.variant is AnsatzVariant.ZERO_DIAG_NON_CARLEMAN:
                return mpc(0)
            cache = self._phi
            if not cache:
                cache.append(mpc(0))
            while len(cache) <= n:
                k = len(cache) - 1
                cache.append(cache[k] + self.theta(k))
            return cache[n]

    # -- Q ------------------------------------------------------------
    def Q_raw(self, n: int) -> mpc:
        """Q_n as an mpc value (MPFR's exponent range holds it)."""
        if n < -1:
            raise DomainError("Q_n is defined for n >= -1")
        if n <= 0:
            return mpc(1)
        with working_precision(self.bits):
            if self.variant is AnsatzVariant.CRITICAL_SINGULAR:
                mag = mpfr(n) ** _q(self.s)
                val = mag * gmpy2.exp(-self.phi(n))
                return val if (self.nu > 0 or n % 2 == 0) else -val
            amp = 1 / gmpy2.sqrt(self.model.a_at(n))
            unit = _ipow(-self.sign, n)
            if self.variant is AnsatzVariant.ZERO_DIAG_NON_CARLEMAN:
                return unit * amp
            return unit * amp * gmpy2.exp(self.sign * mpc(0, 1) * self.z * self.phi(n))

    def Q(self, n: int) -> ScaledComplex:
        with working_precision(self.bits):
            return make_scaled(self.Q_raw(n))

    def ratio_up(self, n: int) -> mpc:
        """Q_{n+1} / Q_n, formed without the large common factor."""
        with working_precision(self.bits):
            if self.variant is AnsatzVariant.CRITICAL_SINGULAR:
                if n <= 0:
                    return self.Q_raw(n + 1) / self.Q_raw(n)
                pw = gmpy2.exp(_q(self.s) * gmpy2.log1p(1 / mpfr(n)))
                return self.nu * pw * gmpy2.exp(-self.theta(n))
            return self.Q_raw(n + 1) / self.Q_raw(n)

    def describe(self) -> dict:
        out = {"variant": self.variant.value, "s": str(self.s), "nu": self.nu}
        if self.sqrt_tau is not None:
            out["sqrt_tau"] = [float(self.sqrt_tau.real), float(self.sqrt_tau.imag)]
        if self.variant is AnsatzVariant.ZERO_DIAG_CARLEMAN:
            out["sign"] = self.sign
        return out


def _ipow(sign: int, n: int) -> mpc:
    """(sign * i)**n exactly."""
    k = n % 4
    base = [mpc(1), mpc(0, 1), mpc(-1), mpc(0, -1)][k]
    return base if sign > 0 or k % 2 == 0 else -base


def build_ansatz(
    model: CoefficientModel,
    variant: AnsatzVariant | str = AnsatzVariant.CRITICAL_SINGULAR,
    z=None,
    bits: int | None = None,
    sign: int | None = None,
    classification: Classification | None = None,
) -> Ansatz:
    """Ansatz for ``model``; the zero-diagonal variants need b_n = 0."""
    variant = AnsatzVariant(variant)
    bits = bits or default_bits(model, 10**4)
    if variant is AnsatzVariant.CRITICAL_SINGULAR:
        cls = classification or classify(model)
        if abs(cls.gamma) != 1:
            raise DomainError("the critical Ansatz needs |gamma| = 1")
        if cls.tau == 0:
            raise UnsupportedError(
                "tau = 0 (doubly critical): use the dediagonalization module for this family"
            )
        with working_precision(bits):
            root = gmpy2.sqrt(_q(abs(cls.tau)))
            sqrt_tau = mpc(root) if cls.tau > 0 else mpc(0, root)
        return Ansatz(variant, model, cls.s, cls.nu, bits, sqrt_tau=sqrt_tau, classification=cls)
    if not model.zero_diagonal:
        raise DomainError("zero-diagonal Ansatz needs b_n = 0")
    if variant is AnsatzVariant.ZERO_DIAG_CARLEMAN:
        if z is None:
            raise DomainError("the Carleman Ansatz depends on z")
        with working_precision(bits):
            z = as_mpc(z)
        if sign is None:
            sign = -1 if z.imag < 0 else 1
        return Ansatz(variant, model, Fraction(0), -1, bits, sign=int(sign), z=z)
    return Ansatz(variant, model, Fraction(0), -1, bits, sign=1)


def remainder(model: CoefficientModel, ansatz: Ansatz, z, n: int) -> mpc:
    """Relative defect r_n of Q in the recurrence (n >= 1).

    Uses the ratios Q_{n-1}/Q_n and Q_{n+1}/Q_n so the exponential factors
    cancel before any subtraction.
    """
    if n < 1:
        raise DomainError("r_n needs n >= 1")
    with working_precision(ansatz.bits):
        z = as_mpc(z)
        a0, _ = model.pair(n - 1)
        a1, b1 = model.pair(n)
        down = 1 / ansatz.ratio_up(n - 1)
        up = ansatz.ratio_up(n)
        return gmpy2.sqrt(a0 / a1) * down + gmpy2.sqrt(a1 / a0) * up + (b1 - z) / gmpy2.sqrt(a0 * a1)


def remainder_expanded(model: CoefficientModel, ansatz: Ansatz, z, n: int) -> mpc:
    """r_n via kappa_n = sqrt(a_{n+1}/a_n), theta_n and gamma_n (critical Ansatz, n >= 2).

    r_n = -nu' kappa_{n-1}^{-1} ((n-1)/n)^s e^{theta_{n-1}} - nu' kappa_{n-1} ((n+1)/n)^s e^{-theta_n}
          + 2 gamma_n - z (a_n a_{n-1})^{-1/2},   with nu' = sign(gamma) = -nu.
    """
    if ansatz.variant is not AnsatzVariant.CRITICAL_SINGULAR or n < 2:
        raise DomainError("expanded remainder needs the critical Ansatz and n >= 2")
    with working_precision(ansatz.bits):
        z = as_mpc(z)
        a0, _ = model.pair(n - 1)
        a1, b1 = model.pair(n)
        kap = gmpy2.sqrt(a1 / a0)
        s = _q(ansatz.s)
        nup = -ansatz.nu
        gam = b1 / (2 * gmpy2.sqrt(a0 * a1))
        t1 = -nup / kap * gmpy2.exp(s * gmpy2.log1p(-1 / mpfr(n))) * gmpy2.exp(ansatz.theta(n - 1))
        t2 = -nup * kap * gmpy2.exp(s * gmpy2.log1p(1 / mpfr(n))) * gmpy2.exp(-ansatz.theta(n))
        return t1 + t2 + 2 * gam - z / gmpy2.sqrt(a1 * a0)


def local_terms(model: CoefficientModel, ansatz: Ansatz, z, n: int):
    """(Lambda_n, R_n) at any n >= 1, from closed forms only."""
    with working_precision(ansatz.bits):
        z = as_mpc(z)
        a0, _ = model.pair(n - 1)
        a1, b1 = model.pair(n)
        up = ansatz.ratio_up(n)
        back = ansatz.ratio_up(n - 1)  # Q_n / Q_{n-1}
        r = gmpy2.sqrt(a0 / a1) / back + gmpy2.sqrt(a1 / a0) * up + (b1 - z) / gmpy2.sqrt(a0 * a1)
        lam = (a1 / a0) * up * back
        R = -gmpy2.sqrt(a1 / a0) * back * r
        return lam, R


@dataclass(frozen=True, eq=False)
class KernelData:
    """Lambda_n, R_n, X_n for n = 0..N+1, with G and the majorant h on demand."""

    model: CoefficientModel
    ansatz: Ansatz
    z: mpc
    N: int
    bits: int
    Lam: list
    R: list
    X: list
    r: list
    _prefix: list = field(default=None, init=False, repr=False)
    _h: dict = field(default_factory=dict, init=False, repr=False)

    def Lambda(self, n: int) -> mpc:
        return self.Lam[n]

    def X_scaled(self, n: int) -> ScaledComplex:
        with working_precision(self.bits):
            return make_scaled(self.X[n])

    def _inv_prefix(self):
        if self._prefix is None:
            with working_precision(self.bits):
                acc = mpc(0)
                pref = [acc]
                for x in self.X:
                    acc = acc + 1 / x
                    pref.append(acc)
            object.__setattr__(self, "_prefix", pref)
        return self._prefix

    def G(self, n: int, m: int) -> mpc:
        """G_{n,m} = X_{m-1} sum_{p=n}^{m-1} 1/X_p (m >= n+1)."""
        if m <= n:
            raise DomainError("G_{n,m} needs m >= n + 1")
        if m - n <= 64:
            return self.G_direct(n, m)
        pref = self._inv_prefix()
        with working_precision(self.bits):
            return self.X[m - 1] * (pref[m] - pref[n])

    def G_direct(self, n: int, m: int) -> mpc:
        """G_{n,m} by the plain double-sum definition."""
        with working_precision(self.bits):
            acc = mpc(0)
            for p in range(n, m):
                acc += 1 / self.X[p]
            return self.X[m - 1] * acc

    def h(self, upto: int | None = None) -> np.ndarray:
        """h_m = sup_{n <= m-1} |G_{n,m} R_m| for m = 0..upto (h_0 = 0).

        The sup is exact for m <= 513 and taken over all n <= 512 plus 64
        geometrically spaced lower indices beyond that.
        """
        upto = self.N if upto is None else min(upto, self.N)
        if upto not in self._h:
            object.__setattr__(self, "_h", {upto: _majorant_profile(self, upto)})
        return self._h[upto]


def _lower_indices(upto: int) -> np.ndarray:
    full = np.arange(0, min(upto, 513))
    if upto <= 513:
        return full
    geo = np.unique(np.geomspace(513, upto - 1, 64).astype(np.int64))
    return np.unique(np.concatenate([full, geo]))


def _majorant_profile(k: KernelData, upto: int) -> np.ndarray:
    # G_{n,m+1} = Lambda_m G_{n,m} + 1 with G_{n,n+1} = 1, run for all sampled n at once
    S = _lower_indices(upto + 1)
    lam = np.array([complex(v) for v in k.Lam[: upto + 1]])
    Rabs = np.array([abs(complex(v)) for v in k.R[: upto + 1]])
    G = np.zeros(len(S), dtype=complex)
    h = np.zeros(upto + 1)
    active = 0
    for m in range(1, upto + 1):
        while active < len(S) and S[active] <= m - 1:
            active += 1
        G[:active] = lam[m - 1] * G[:active] + 1.0
        h[m] = Rabs[m] * np.abs(G[:active]).max()
    return h


def kernel(model: CoefficientModel, ansatz: Ansatz, z, N: int) -> KernelData:
    """Tabulate Lambda_n, R_n (n = 1..N+1) and X_n (n = 0..N+1) from closed forms."""
    if N < 2:
        raise DomainError("kernel horizon must be at least 2")
    bits = ansatz.bits
    with working_precision(bits):
        z = as_mpc(z)
        a, b = model.arrays(N + 3)
        Q = [ansatz.Q_raw(n) for n in range(0, N + 3)]
        lam = [mpc(0)]
        R = [mpc(0)]
        r = [mpc(0)]
        crit = ansatz.variant is AnsatzVariant.CRITICAL_SINGULAR
        up = ansatz.ratio_up(0) if crit else None
        for n in range(1, N + 2):
            a0, a1 = a[n - 1], a[n]
            if crit:
                back = up
                up = ansatz.ratio_up(n)
            else:
                up = Q[n + 1] / Q[n]
                back = Q[n] / Q[n - 1]
            rn = gmpy2.sqrt(a0 / a1) / back + gmpy2.sqrt(a1 / a0) * up + (b[n] - z) / gmpy2.sqrt(a0 * a1)
            r.append(rn)
            lam.append((a1 / a0) * up * back)
            R.append(-gmpy2.sqrt(a1 / a0) * back * rn)
        norm = a[0] * Q[0] * Q[1]
        X = [a[n] * Q[n] * Q[n + 1] / norm for n in range(0, N + 2)]
    return KernelData(model, ansatz, z, N, bits, lam, R, X, r)


@dataclass(frozen=True)
class MajorantResult:
    n: int
    M: int
    h_n: float
    H_n: float
    tail: float
    fitted_exponent: float
    amplitude: float
    reliable: bool
    warning: str = ""


def _fit_power(h: np.ndarray, M: int):
    lo = max(2, M // 4)
    m = np.arange(lo, M + 1)
    y = h[lo : M + 1]
    keep = y > 0
    if keep.sum() < 2:
        return 0.0, -np.inf
    slope, icpt = np.polyfit(np.log(m[keep]), np.log(y[keep]), 1)
    return float(np.exp(icpt)), float(slope)


def majorant_profile(k: KernelData, M: int | None = None):
    """Arrays h[0..M], H[0..M] with H_n = sum_{p=n+1}^{M} h_p + power-law tail."""
    M = k.N if M is None else min(M, k.N)
    h = k.h(M)[: M + 1]
    amp, slope = _fit_power(h, M)
    warning = ""
    reliable = True
    expo = slope
    cls = k.ansatz.classification
    if k.ansatz.variant is AnsatzVariant.CRITICAL_SINGULAR and cls is not None:
        expo = 0.5 - float(cls.delta)
        # amplitude matched to the analytic exponent over the fit window
        lo = max(2, M // 4)
        mm = np.arange(lo, M + 1)
        amp = float(np.max(h[lo : M + 1] * mm ** (-expo)))
    if slope >= -1 or expo >= -1:
        warning = f"fitted tail exponent {slope:.3f} >= -1: majorant not summable"
        reliable = False
        tail = np.inf
    else:
        tail = amp * M ** (expo + 1) / (-(expo + 1))
    suffix = np.concatenate([np.cumsum(h[::-1])[::-1][1:], [0.0]])
    H = suffix + tail
    return h, H, {"tail": tail, "fitted_exponent": slope, "exponent": expo, "amplitude": amp, "reliable": reliable, "warning": warning}


def error_majorant(k: KernelData, n: int, M: int | None = None) -> MajorantResult:
    """(h_n, H_n) with the infinite tail of H extrapolated by a power law."""
    M = k.N if M is None else M
    if n >= M:
        raise DomainError("error_majorant needs n < M")
    h, H, info = majorant_profile(k, M)
    return MajorantResult(
        n, M, float(h[n]), float(H[n]), float(info["tail"]), info["fitted_exponent"], info["amplitude"],
        info["reliable"], info["warning"],
    )


def diagnostic_csv(k: KernelData, rows=None) -> str:
    """CSV columns n, Re theta, Im theta, log10|Q|, log10|r|, log10|R|, log10|X|, h."""
    rows = range(1, k.N + 1) if rows is None else rows
    h = k.h()
    buf = io.StringIO()
    buf.write("n,re_theta,im_theta,log10_abs_Q,log10_abs_r,log10_abs_R,log10_abs_X,h\n")
    with working_precision(k.bits):
        for n in rows:
            th = k.ansatz.theta(n)
            vals = [_lg(k.ansatz.Q_raw(n)), _lg(k.r[n]), _lg(k.R[n]), _lg(k.X[n])]
            buf.write(
                f"{n},{float(th.real):.12e},{float(th.imag):.12e},"
                + ",".join(vals)
                + f",{h[n]:.12e}\n"
            )
    return buf.getvalue()


def _lg(v) -> str:
    if v == 0:
        return "-inf"
    return f"{float(log10_magnitude(make_scaled(v))):.12f}"
