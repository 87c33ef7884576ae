"""Three-term recurrence engine.

Solutions of ``a_{n-1} f_{n-1} + (b_n - z) f_n + a_n f_{n+1} = 0`` are held in
:class:`SolutionSeq`. The boundary value ``a_{-1} = 1/2`` is used throughout,
so the polynomial solution has ``P_{-1} = 0, P_0 = 1`` and the Wronskian at
``n = -1`` reads ``(f_{-1} g_0 - f_0 g_{-1}) / 2``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

from . import kernels
from .coeffs import CoefficientModel
from .errors import DomainError, RangeError, VerificationError
from .scalednum import (
    PrecisionPolicy,
    ScaledComplex,
    as_mpc,
    format_real,
    log10_magnitude,
    make_scaled,
    working_precision,
)

A_MINUS_ONE = mpfr("0.5")


class DegenerateInputError(DomainError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


def default_bits(model: CoefficientModel, n_max: int, delta: float = 2.0) -> int:
    return PrecisionPolicy(model.precision, max(int(n_max), 2), delta).effective_bits


@dataclass(frozen=True, eq=False)
class SolutionSeq:
    """Solution values f_start..f_end as raw mpc, plus the spectral parameter."""

    start: int
    raw: list
    z: mpc
    meta: str
    bits: int
    _scaled: list = field(default=None, init=False, repr=False)

    @property
    def end(self) -> int:
        return self.start + len(self.raw) - 1

    def __len__(self) -> int:
        return len(self.raw)

    def __contains__(self, n: int) -> bool:
        return self.start <= n <= self.end

    def __getitem__(self, n: int) -> mpc:
        if not (self.start <= n <= self.end):
            raise RangeError(f"index {n} outside [{self.start}, {self.end}]")
        return self.raw[n - self.start]

    def scaled(self, n: int) -> ScaledComplex:
        with working_precision(self.bits):
            return make_scaled(self[n])

    @property
    def values(self) -> list:
        """Entries as normalized :class:`ScaledComplex` (computed once)."""
        if self._scaled is None:
            with working_precision(self.bits):
                object.__setattr__(self, "_scaled", [make_scaled(v) for v in self.raw])
        return self._scaled

    def indices(self) -> range:
        return range(self.start, self.end + 1)

    def conjugate(self, meta: str = "conjugate") -> "SolutionSeq":
        """Entrywise conjugate; it solves the recurrence at conj(z)."""
        with working_precision(self.bits):
            return SolutionSeq(self.start, [v.conjugate() for v in self.raw], self.z.conjugate(), meta, self.bits)

    def relabel(self, z, meta: str) -> "SolutionSeq":
        return SolutionSeq(self.start, self.raw, as_mpc(z), meta, self.bits)

    def scale(self, c) -> "SolutionSeq":
        with working_precision(self.bits):
            c = as_mpc(c)
            return SolutionSeq(self.start, [c * v for v in self.raw], self.z, self.meta, self.bits)

    def to_csv(self, fh=None, start=None, end=None) -> str:
        """CSV with columns n, Re(mantissa), Im(mantissa), exp2, log10|f_n|."""
        buf = io.StringIO()
        buf.write("n,re_mantissa,im_mantissa,exp2,log10_abs\n")
        lo = self.start if start is None else max(start, self.start)
        hi = self.end if end is None else min(end, self.end)
        with working_precision(self.bits):
            for n in range(lo, hi + 1):
                s = make_scaled(self[n])
                lg = "-inf" if s.is_zero() else _fmt(log10_magnitude(s), 12)
                buf.write(f"{n},{_fmt(s.mantissa.real)},{_fmt(s.mantissa.imag)},{s.exp2},{lg}\n")
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


def _fmt(x, digits: int = 21) -> str:
    return format_real(x, digits)


def _z(z) -> mpc:
    return as_mpc(z)


def forward_polynomials(model: CoefficientModel, z, N: int, bits: int | None = None) -> SolutionSeq:
    """Orthonormal polynomials P_{-1..N}(z) with P_{-1} = 0, P_0 = 1."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    bits = bits or default_bits(model, N)
    with working_precision(bits):
        z = _z(z)
        a, b = model.arrays(N)
        p0, p1 = mpc(0), mpc(1)
        rest = kernels.forward_recurrence(a, b, z, p0, p1, A_MINUS_ONE, N)
        return SolutionSeq(-1, [p0, p1] + rest, z, "polynomial", bits)


def backward_solution(model: CoefficientModel, z, tail, M: int, bits: int | None = None, meta="custom") -> SolutionSeq:
    """Solution f_{-1..M+1} determined by tail data (f_M, f_{M+1})."""
    if M < 0:
        raise DomainError("M must be nonnegative")
    bits = bits or default_bits(model, M)
    with working_precision(bits):
        z = _z(z)
        fM, fM1 = (as_mpc(t) for t in tail)
        fM, fM1 = mpc(fM), mpc(fM1)
        a, b = model.arrays(M + 1)
        vals = kernels.backward_recurrence(a, b, z, fM, fM1, M, A_MINUS_ONE)
        return SolutionSeq(-1, vals, z, meta, bits)


def _a(model, n):
    if n == -1:
        return A_MINUS_ONE
    return model.a_at(n)


def wronskian_raw(model: CoefficientModel, F: SolutionSeq, G: SolutionSeq, n: int) -> mpc:
    if n not in F or n + 1 not in F or n not in G or n + 1 not in G:
        raise RangeError(f"Wronskian at n={n} needs both sequences on [{n}, {n + 1}]")
    if F.z != G.z:
        raise DomainError("Wronskian of solutions at different z")
    bits = max(F.bits, G.bits)
    with working_precision(bits):
        return _a(model, n) * (F[n] * G[n + 1] - F[n + 1] * G[n])


def wronskian(model: CoefficientModel, F: SolutionSeq, G: SolutionSeq, n: int) -> ScaledComplex:
    """W[F, G] = a_n (F_n G_{n+1} - F_{n+1} G_n), with a_{-1} = 1/2."""
    w = wronskian_raw(model, F, G, n)
    with working_precision(max(F.bits, G.bits)):
        return make_scaled(w)


def recurrence_residual(model: CoefficientModel, F: SolutionSeq, lo: int | None = None, hi: int | None = None) -> float:
    """max_n |a_{n-1}F_{n-1} + (b_n - z)F_n + a_n F_{n+1}| / max(|a_{n-1}F_{n-1}|, |a_n F_{n+1}|)."""
    lo = max(F.start + 1, 0 if lo is None else lo)
    hi = F.end - 1 if hi is None else min(hi, F.end - 1)
    worst = mpfr(0)
    with working_precision(F.bits):
        a, b = model.arrays(hi + 1)
        for n in range(lo, hi + 1):
            am = A_MINUS_ONE if n == 0 else a[n - 1]
            t1 = am * F[n - 1]
            t3 = a[n] * F[n + 1]
            res = t1 + (b[n] - F.z) * F[n] + t3
            scale = max(abs(t1), abs(t3))
            if scale == 0:
                continue
            worst = max(worst, abs(res) / scale)
    return float(worst)


def _choose_n0(f: SolutionSeq, bits: int) -> int:
    """Smallest n >= 1 past which no f_m is an incidental near-zero.

    f_m counts as a near-zero when it is below 2**(-bits/2) times the larger
    of its neighbours; scanning runs from the top of the computed range down.
    """
    thresh = gmpy2.mul_2exp(mpfr(1), -(bits // 2))
    n0 = 1
    for m in range(f.end - 1, max(f.start, 0), -1):
        nb = max(abs(f[m - 1]), abs(f[m + 1]))
        if abs(f[m]) <= thresh * nb:
            n0 = m + 2
            break
    return n0


def second_solution(model: CoefficientModel, f: SolutionSeq, n0: int | None = None) -> SolutionSeq:
    """g_n = f_n * sum_{m=n0}^{n} 1/(a_{m-1} f_{m-1} f_m), normalized so W[f, g] = 1.

    Entries below n0 are filled in by the recurrence, so the result is a
    solution on the whole range of ``f``.
    """
    bits = f.bits
    with working_precision(bits):
        if n0 is None:
            n0 = _choose_n0(f, bits)
        if n0 < 0 or n0 >= f.end:
            raise DomainError(f"n0={n0} outside the range of f")
        a, b = model.arrays(f.end + 1)
        total = mpc(0)
        g = {}
        for m in range(n0, f.end + 1):
            fm1, fm = f[m - 1], f[m]
            if fm1 == 0 or fm == 0:
                raise DegenerateInputError(f"f vanishes at index {m - 1 if fm1 == 0 else m}", m - 1 if fm1 == 0 else m)
            am = A_MINUS_ONE if m == 0 else a[m - 1]
            total += 1 / (am * fm1 * fm)
            g[m] = fm * total
        if n0 > 0:
            low = backward_solution(model, f.z, (g[n0], g[n0 + 1]), n0, bits=bits)
            head = [low[n] for n in range(-1, n0)]
        else:
            head = [f[-1] * 0]  # g_{-1} from the recurrence at n = 0
            am = A_MINUS_ONE
            head[0] = ((f.z - b[0]) * g[0] - a[0] * g[1]) / am
        vals = head + [g[m] for m in range(n0, f.end + 1)]
        out = SolutionSeq(-1, vals, f.z, "second", bits)
        tol = gmpy2.mul_2exp(mpfr(1), -(bits // 2))
        for n in sorted({n0, (n0 + f.end) // 2, f.end - 1}):
            w = wronskian_raw(model, f, out, n)
            if abs(w - 1) > tol:
                raise VerificationError(f"W[f, g] = {complex(w)} at n={n}, expected 1")
        return out
