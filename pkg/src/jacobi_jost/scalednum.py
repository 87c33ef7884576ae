"""Complex numbers with a separate wide exponent, and the precision policy.

A :class:`ScaledComplex` stores ``mantissa * 2**exp2`` with ``1 <= |mantissa| < 2``
(or an exact zero). Mantissas are gmpy2 ``mpc`` values; all arithmetic runs
at the precision of the active gmpy2 context with round-to-nearest-even.

The recurrence kernels work on raw ``mpc`` values, whose MPFR exponent range
already covers the magnitudes met here; values are converted to
``ScaledComplex`` at module boundaries (reports, serialization, log scales).
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import DomainError, RangeError

EXP_MIN = -(2**63)
EXP_MAX = 2**63 - 1


@contextlib.contextmanager
def working_precision(bits: int):
    """Run a block with the gmpy2 context set to ``bits`` and nearest rounding."""
    with gmpy2.context(gmpy2.get_context(), precision=int(bits), round=gmpy2.RoundToNearest) as ctx:
        yield ctx


def as_mpc(x) -> mpc:
    if isinstance(x, ScaledComplex):
        return x.to_mpc()
    if isinstance(x, mpc):
        return x
    if isinstance(x, complex):
        return mpc(x)
    return mpc(x)


def _check_exp(e: int) -> int:
    if e < EXP_MIN or e > EXP_MAX:
        raise RangeError(f"binary exponent {e} outside the signed 64-bit range")
    return e


class ScaledComplex:
    """Immutable ``mantissa * 2**exp2`` with ``|mantissa|`` in [1, 2)."""

    __slots__ = ("mantissa", "exp2")

    def __init__(self, mantissa: mpc, exp2: int):
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exp2", exp2)

    def __setattr__(self, name, value):
        raise AttributeError("ScaledComplex is immutable")

    def __repr__(self) -> str:
        return f"ScaledComplex({self.mantissa!r}, {self.exp2})"

    def __str__(self) -> str:
        return format_scaled(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScaledComplex):
            return NotImplemented
        return self.exp2 == other.exp2 and self.mantissa == other.mantissa

    def __hash__(self) -> int:
        return hash((self.exp2, self.mantissa))

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def to_mpc(self) -> mpc:
        if self.exp2 == 0:
            return self.mantissa
        return gmpy2.mul_2exp(self.mantissa, self.exp2)

    def __mul__(self, other):
        return scaled_mul(self, other)

    def __truediv__(self, other):
        return scaled_div(self, other)

    def __add__(self, other):
        return scaled_add(self, other)

    def __sub__(self, other):
        return scaled_add(self, -other)

    def __neg__(self):
        return ScaledComplex(-self.mantissa, self.exp2)

    def conjugate(self):
        return ScaledComplex(self.mantissa.conjugate(), self.exp2)


def _normalize(m: mpc, e: int) -> ScaledComplex:
    if m == 0:
        return ScaledComplex(mpc(0), 0)
    mag = abs(m)
    k, _ = gmpy2.frexp(mag)  # mag = f * 2**k with f in [1/2, 1)
    shift = int(k) - 1
    if shift:
        m = gmpy2.mul_2exp(m, -shift)
    # hypot rounding can leave |m| a hair outside [1, 2)
    mag = abs(m)
    if mag >= 2:
        m = gmpy2.mul_2exp(m, -1)
        shift += 1
    elif mag < 1:
        m = gmpy2.mul_2exp(m, 1)
        shift -= 1
    return ScaledComplex(m, _check_exp(e + shift))


def make_scaled(x) -> ScaledComplex:
    """Normalized scaled form of a finite complex value (exact)."""
    if isinstance(x, ScaledComplex):
        return x
    v = as_mpc(x)
    if not (gmpy2.is_finite(v.real) and gmpy2.is_finite(v.imag)):
        raise DomainError(f"cannot scale non-finite value {x!r}")
    return _normalize(v, 0)


def scaled_mul(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex:
    a, b = make_scaled(a), make_scaled(b)
    if a.is_zero() or b.is_zero():
        return ScaledComplex(mpc(0), 0)
    return _normalize(a.mantissa * b.mantissa, _check_exp(a.exp2 + b.exp2))


def scaled_div(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex:
    a, b = make_scaled(a), make_scaled(b)
    if b.is_zero():
        raise DomainError("division by an exact zero")
    if a.is_zero():
        return ScaledComplex(mpc(0), 0)
    return _normalize(a.mantissa / b.mantissa, _check_exp(a.exp2 - b.exp2))


def scaled_add(a: ScaledComplex, b: ScaledComplex) -> ScaledComplex:
    a, b = make_scaled(a), make_scaled(b)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.exp2 < b.exp2:
        a, b = b, a
    gap = a.exp2 - b.exp2
    prec = gmpy2.get_context().precision
    if gap > prec + 4:
        # the smaller addend sits entirely below the rounding position
        return _normalize(a.mantissa, a.exp2)
    return _normalize(a.mantissa + gmpy2.mul_2exp(b.mantissa, -gap), a.exp2)


def to_log_magnitude(a) -> mpfr:
    """ln|a| as a working-precision real."""
    a = make_scaled(a)
    if a.is_zero():
        raise DomainError("log magnitude of zero")
    return gmpy2.log(abs(a.mantissa)) + a.exp2 * gmpy2.const_log2()


def log10_magnitude(a) -> mpfr:
    return to_log_magnitude(a) / gmpy2.log(mpfr(10))


def scaled_exp(w) -> ScaledComplex:
    """e**w for complex w without forming the possibly huge intermediate."""
    w = as_mpc(w)
    ln2 = gmpy2.const_log2()
    k = int(gmpy2.floor(w.real / ln2))
    rest = w.real - k * ln2
    m = gmpy2.exp(rest) * mpc(gmpy2.cos(w.imag), gmpy2.sin(w.imag))
    return _normalize(m, _check_exp(k))


def format_real(x, digits: int = 20) -> str:
    """Scientific notation with ``digits`` significant digits, e.g. ``-3.1416e+00``."""
    x = mpfr(x)
    if x == 0:
        return "0"
    if not gmpy2.is_finite(x):
        return str(x)
    mant, exp, _ = gmpy2.digits(x, 10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    e = exp - 1
    body = mant[0] + ("." + mant[1:] if len(mant) > 1 else "")
    return f"{sign}{body}e{'+' if e >= 0 else '-'}{abs(e):02d}"


def format_scaled(a, digits: int = 3) -> str:
    """Report form like ``(0.923-0.385i)*10^-4312.77``.

    The mantissa is the unit phase ``x/|x|`` and the exponent is log10|x|.
    """
    a = make_scaled(a)
    if a.is_zero():
        return "(0)·10^0"
    unit = a.mantissa / abs(a.mantissa)
    re = float(unit.real)
    im = float(unit.imag)
    sign = "+" if im >= 0 else "−"
    lg = float(log10_magnitude(a))
    lg_txt = f"{lg:.2f}".replace("-", "−")
    re_txt = f"{re:.{digits}f}".replace("-", "−")
    return f"({re_txt}{sign}{abs(im):.{digits}f}i)·10^{lg_txt}"


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision with a guard for the cancellation in the remainder.

    The guard is ``ceil(delta * log2(n_max)) + 64`` extra bits.
    """

    base_bits: int = 256
    n_max: int = 10**4
    delta: float = 2.0

    def __post_init__(self):
        if self.base_bits < 2:
            raise DomainError("base precision must be positive")

    @property
    def cancellation_guard(self) -> int:
        return math.ceil(self.delta * math.log2(max(self.n_max, 2))) + 64

    @property
    def effective_bits(self) -> int:
        return max(128, self.base_bits + self.cancellation_guard)

    def as_dict(self) -> dict:
        return {
            "base_bits": self.base_bits,
            "n_max": self.n_max,
            "delta": self.delta,
            "cancellation_guard": self.cancellation_guard,
            "effective_bits": self.effective_bits,
        }
