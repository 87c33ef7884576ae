"""Squaring a zero-diagonal Jacobi operator into an even/odd pair.

If the source has b_n = 0 and off-diagonal entries A_n, its square splits on
even and odd indices into two Jacobi operators

    a+_n = A_{2n} A_{2n+1},      b+_n = A_{2n-1}^2 + A_{2n}^2   (A_{-1} = 0),
    a-_n = A_{2n+1} A_{2n+2},    b-_n = A_{2n}^2 + A_{2n+1}^2,

whose polynomials are P+_n(z) = P_{2n}(sqrt z) and
P-_n(z) = A_0 P_{2n+1}(sqrt z) / sqrt z (this normalization makes P-_0 = 1).
For A_n = (n/2)^{sigma/2}(1 + ah/n) both derived operators have gamma = 1,
the same sigma and tau = 0, with

    alpha+ = ah + sigma/4,     beta+ = ah - sigma/4,
    alpha- = ah + 3 sigma/4,   beta- = ah + sigma/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .coeffs import Asymptotics, CoefficientModel, Variant, classify
from .errors import DomainError
from .recurrence import default_bits, forward_polynomials
from .scalednum import as_mpc, working_precision
from .spectral import truncated_eigs

PLUS, MINUS = "+", "-"


@dataclass(frozen=True, eq=False)
class DediagPair:
    source: CoefficientModel
    plus: CoefficientModel
    minus: CoefficientModel
    n_rows: int

    def model(self, sign: str) -> CoefficientModel:
        if sign not in (PLUS, MINUS):
            raise DomainError("sign must be '+' or '-'")
        return self.plus if sign == PLUS else self.minus


def _hints(source: CoefficientModel):
    shape = source.zero_diag_shape()
    if shape is None:
        return None, None
    s, ah = shape.sigma, shape.alpha_hat
    plus = Asymptotics(s, ah + s / 4, ah - s / 4, Fraction(1))
    # the odd-indexed products sit half a step further out than the even ones
    minus = Asymptotics(s, ah + 3 * s / 4, ah + s / 4, Fraction(1))
    return plus, minus


def dediagonalize(source: CoefficientModel, n_rows: int = 256, bits: int | None = None) -> DediagPair:
    """Table-backed J+ and J- with ``n_rows`` rows each (needs 2 n_rows + 1 source entries)."""
    if n_rows < 1:
        raise DomainError("n_rows must be positive")
    bits = bits or source.precision + 64
    need = 2 * n_rows + 1
    with working_precision(bits):
        a, b = source.arrays(need)
        bad = [n for n in range(need) if b[n] != 0]
        if bad:
            raise DomainError(f"source has a nonzero diagonal entry at n={bad[0]}")
        A = list(a[:need])
        sq = [x * x for x in A]
        plus_rows, minus_rows = [], []
        for n in range(n_rows):
            bp = (sq[2 * n - 1] if n > 0 else mpfr(0)) + sq[2 * n]
            plus_rows.append((A[2 * n] * A[2 * n + 1], bp))
            if 2 * n + 2 < need:
                minus_rows.append((A[2 * n + 1] * A[2 * n + 2], sq[2 * n] + sq[2 * n + 1]))
    hp, hm = _hints(source)
    tag = source.name or source.variant.value
    plus = CoefficientModel(Variant.TABLE, table=tuple(plus_rows), precision=bits, asymptotics_hint=hp, name=f"{tag}+")
    minus = CoefficientModel(Variant.TABLE, table=tuple(minus_rows), precision=bits, asymptotics_hint=hm, name=f"{tag}-")
    return DediagPair(source, plus, minus, n_rows)


def dual_hahn_source(x, y, n_entries: int = 4096, precision: int = 256) -> CoefficientModel:
    """Zero-diagonal table with A_{2n} = sqrt((n+x)(n+y)), A_{2n+1} = sqrt((n+1)(n+x+y))."""
    x, y = Fraction(x), Fraction(y)
    rows = []
    with working_precision(precision):
        for m in range(n_entries):
            n = m // 2
            v = (n + x) * (n + y) if m % 2 == 0 else (n + 1) * (n + x + y)
            rows.append((gmpy2.sqrt(mpfr(gmpy2.mpq(v.numerator, v.denominator))), mpfr(0)))
    return CoefficientModel(Variant.TABLE, table=tuple(rows), precision=precision, name=f"dual-hahn-source({x},{y})")


def _sqrt_principal(z: mpc) -> mpc:
    return gmpy2.sqrt(z)


def polynomial_identity_check(pair: DediagPair, sign: str, z, n_max: int, bits: int | None = None) -> dict:
    """max_n<=n_max relative deviation between P(+-)_n(z) and the source polynomials at sqrt z."""
    model = pair.model(sign)
    if n_max >= model.size:
        raise DomainError(f"n_max={n_max} exceeds the {model.size} rows of the derived model")
    bits = bits or default_bits(pair.source, 2 * n_max + 2)
    with working_precision(bits):
        z = as_mpc(z)
        if sign == MINUS and z == 0:
            raise DomainError("the minus identity divides by sqrt z; z = 0 is excluded")
        w = _sqrt_principal(z)
        Ps = forward_polynomials(pair.source, w, 2 * n_max + 2, bits=bits)
        Pd = forward_polynomials(model, z, n_max, bits=bits)
        a0 = pair.source.a_at(0)
        worst = mpfr(0)
        tiny = gmpy2.mul_2exp(mpfr(1), -bits)
        for n in range(n_max + 1):
            rhs = Ps[2 * n] if sign == PLUS else a0 * Ps[2 * n + 1] / w
            dev = abs(Pd[n] - rhs) / max(abs(rhs), tiny)
            worst = max(worst, dev)
        lg = float(gmpy2.log10(worst)) if worst > 0 else -math.inf
    return {"sign": sign, "z": [float(z.real), float(z.imag)], "n_max": n_max, "max_residual": float(worst), "max_residual_log10": lg}


def sign_symmetry_check(source: CoefficientModel, z, n_max: int, bits: int | None = None) -> float:
    """max_n |P_n(-z) - (-1)^n P_n(z)| / |P_n(z)| for a zero-diagonal model."""
    bits = bits or default_bits(source, n_max)
    with working_precision(bits):
        z = as_mpc(z)
        P = forward_polynomials(source, z, n_max, bits=bits)
        Q = forward_polynomials(source, -z, n_max, bits=bits)
        worst = mpfr(0)
        for n in range(n_max + 1):
            t = P[n] if n % 2 == 0 else -P[n]
            if P[n] != 0:
                worst = max(worst, abs(Q[n] - t) / abs(P[n]))
        return float(worst)


def interleaving_check(source: CoefficientModel, N: int, bits: int = 256, rel_width: float = 1e-40) -> dict:
    """Finite-section form of the squaring identity.

    eig(J+_N) equals the squares of eig(J_{2N}), eig(J-_N) the squares of the
    nonzero eig(J_{2N+1}), and the two sets interlace
    l+_1 <= l-_1 <= l+_2 <= ... (Cauchy interlacing of J_{2N} in J_{2N+1}).
    """
    pair = dediagonalize(source, N + 1, bits)
    ev = lambda model, n: truncated_eigs(model, n, None, rel_width, bits)  # noqa: E731
    with working_precision(bits):
        e2N = [e.value for e in ev(source, 2 * N).eigenvalues]
        e2N1 = [e.value for e in ev(source, 2 * N + 1).eigenvalues]
        ep = [e.value for e in ev(pair.plus, N).eigenvalues]
        em = [e.value for e in ev(pair.minus, N).eigenvalues]
        # spectra are symmetric; J_{2N+1} has one zero eigenvalue in the middle
        sq_even = [v * v for v in e2N[N:]]
        sq_odd = [v * v for v in e2N1[N + 1 :]]
        scale = max([abs(v) for v in ep + em] + [mpfr(1)])
        dev_plus = max(abs(p - q) for p, q in zip(ep, sq_even)) / scale if len(ep) == len(sq_even) else mpfr("inf")
        dev_minus = max(abs(p - q) for p, q in zip(em, sq_odd)) / scale if len(em) == len(sq_odd) else mpfr("inf")
        merged = []
        for i in range(N):
            merged.append(ep[i])
            merged.append(em[i])
        interlaced = all(merged[i] <= merged[i + 1] for i in range(len(merged) - 1))
    return {
        "N": N,
        "plus_vs_even_squares": float(dev_plus),
        "minus_vs_odd_squares": float(dev_minus),
        "interlaced": interlaced,
        "plus": [float(v) for v in ep],
        "minus": [float(v) for v in em],
    }


# ----------------------------------------------------------------------
# asymptotic checks


def _resolve(model_or_pair, sign):
    if isinstance(model_or_pair, DediagPair):
        return model_or_pair.model(sign or PLUS)
    return model_or_pair


def _phase_variable(sigma: Fraction, n: np.ndarray) -> np.ndarray:
    if sigma == 2:
        return np.log(n)
    e = 1 - float(sigma) / 2
    return n**e / e


def _normalized(model, z, N: int, sigma: Fraction, bits: int):
    P = forward_polynomials(model, z, N, bits=bits)
    q = float(sigma) / 4
    out = np.empty(N + 1, dtype=complex)
    with working_precision(bits):
        for n in range(1, N + 1):
            v = P[n] * (mpfr(n) ** mpfr(q))
            out[n] = complex(v if n % 2 == 0 else -v)
    out[0] = complex(P[0])
    return out, P


def regular_asymptotics_check(model_or_pair, sign=None, lam=1.0, N: int = 10**5, n_lo: int = 1000, bits: int | None = None) -> dict:
    """Oscillation of (-1)^n n^{sigma/4} P_n(lambda) in the regular doubly critical case.

    Zero crossings are located by linear interpolation in the phase variable
    t = log n (sigma = 2) or n^{1-sigma/2}/(1-sigma/2) (sigma < 2); their
    spacing should approach pi/sqrt(lambda).
    """
    model = _resolve(model_or_pair, sign)
    cls = classify(model)
    sigma = cls.sigma
    if not (Fraction(2, 3) < sigma <= 2):
        raise DomainError(f"sigma={sigma} outside (2/3, 2]; use singular_flat_check for sigma > 2")
    if lam <= 0:
        raise DomainError("lambda must be positive")
    if model.size is not None and N >= model.size:
        raise DomainError(f"N={N} exceeds the {model.size} rows of the model")
    bits = bits or default_bits(model, N)
    y, _ = _normalized(model, mpfr(lam), N, sigma, bits)
    yr = y.real
    ns = np.arange(n_lo, N + 1)
    t = _phase_variable(sigma, ns.astype(float))
    seg = yr[n_lo : N + 1]
    crossings = []
    for i in range(len(seg) - 1):
        if seg[i] == 0:
            crossings.append(t[i])
        elif seg[i] * seg[i + 1] < 0:
            frac = seg[i] / (seg[i] - seg[i + 1])
            crossings.append(t[i] + frac * (t[i + 1] - t[i]))
    crossings = np.array(crossings)
    spacings = np.diff(crossings)
    target = math.pi / math.sqrt(lam)
    # envelope over dyadic windows
    windows = []
    lo = n_lo
    while lo < N:
        hi = min(2 * lo, N)
        windows.append({"n": [int(lo), int(hi)], "max_abs": float(np.max(np.abs(yr[lo : hi + 1])))})
        lo = hi
    # amplitude and phase: y ~ A sin(sqrt(lam) t + eta) by linear least squares
    k = math.sqrt(lam)
    X = np.column_stack([np.sin(k * t), np.cos(k * t)])
    coef, *_ = np.linalg.lstsq(X, seg, rcond=None)
    amp = float(math.hypot(*coef))
    eta = float(math.atan2(coef[1], coef[0]))
    fit_res = float(np.max(np.abs(X @ coef - seg)) / max(amp, 1e-300))
    out = {
        "lambda": lam,
        "sigma": str(sigma),
        "phase_variable": "log n" if sigma == 2 else f"n^(1-sigma/2)/(1-sigma/2)",
        "target_spacing": target,
        "crossings": [float(c) for c in crossings],
        "spacings": [float(s) for s in spacings],
        "mean_spacing": float(np.mean(spacings)) if len(spacings) else None,
        "max_relative_spacing_error": float(np.max(np.abs(spacings / target - 1))) if len(spacings) else None,
        "envelope": windows,
        "amplitude": amp,
        "phase": eta,
        "fit_max_relative_residual": fit_res,
    }
    return out


def crossing_table_csv(report: dict) -> str:
    lines = ["k,t_crossing,spacing"]
    cs = report["crossings"]
    for i, c in enumerate(cs):
        sp = "" if i == 0 else f"{cs[i] - cs[i - 1]:.12e}"
        lines.append(f"{i},{c:.12e},{sp}")
    return "\n".join(lines) + "\n"


def singular_flat_check(model_or_pair, sign=None, z=1, N: int = 20000, levels: int = 4, bits: int | None = None) -> dict:
    """Convergence of (-1)^n n^{sigma/4} P_n(z) and l2 saturation of P (sigma > 2)."""
    model = _resolve(model_or_pair, sign)
    cls = classify(model)
    sigma = cls.sigma
    if sigma <= 2:
        raise DomainError(f"sigma={sigma} <= 2: the flat asymptotics need sigma > 2")
    if model.size is not None and N >= model.size:
        raise DomainError(f"N={N} exceeds the {model.size} rows of the model")
    bits = bits or default_bits(model, N)
    with working_precision(bits):
        zc = as_mpc(z)
    y, P = _normalized(model, zc, N, sigma, bits)
    checkpoints = [max(2, N >> (levels - 1 - i)) for i in range(levels)]
    incs = []
    for i in range(1, len(checkpoints)):
        a, b = y[checkpoints[i - 1]], y[checkpoints[i]]
        incs.append({"from": checkpoints[i - 1], "to": checkpoints[i], "relative_increment": float(abs(b - a) / abs(b))})
    with working_precision(bits):
        acc = mpfr(0)
        norms = []
        j = 0
        for n in range(N + 1):
            acc += gmpy2.norm(P[n])
            if n == checkpoints[j]:
                norms.append(acc)
                j += 1
                if j == len(checkpoints):
                    break
        norm_incs = [float((norms[i] - norms[i - 1]) / norms[i]) for i in range(1, len(norms))]
    return {
        "z": [float(zc.real), float(zc.imag)],
        "sigma": str(sigma),
        "kappa_estimate": [float(y[N].real), float(y[N].imag)],
        "cauchy_increments": incs,
        "l2_partial_norms": [float(v) for v in norms],
        "l2_relative_increments": norm_incs,
    }


# ----------------------------------------------------------------------
# Stieltjes-Carlitz


def stieltjes_carlitz_gaps(k, N: int, window=(-20.0, 20.0), rel_width: float = 1e-12) -> dict:
    """Finite-section eigenvalues in ``window`` with gaps and interior gap ratios."""
    from .coeffs import CoefficientModel as _CM

    model = _CM(Variant.STIELTJES_CARLITZ, {"k": k})
    rep = truncated_eigs(model, N, window, rel_width)
    vals = np.array(rep.values)
    gaps = np.diff(vals)
    ratios = gaps[1:] / gaps[:-1] if len(gaps) > 1 else np.array([])
    return {
        "k": str(Fraction(k)),
        "N": N,
        "window": list(window),
        "eigenvalues": vals.tolist(),
        "max_gap": float(gaps.max()) if len(gaps) else math.inf,
        "gap_ratios": ratios.tolist(),
        "max_ratio_deviation": float(np.max(np.abs(ratios - 1))) if len(ratios) else None,
    }
