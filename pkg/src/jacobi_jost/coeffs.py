"""Coefficient families of Jacobi matrices and their asymptotic classification.

A Jacobi matrix has off-diagonal entries ``a_n > 0`` and diagonal ``b_n``.
Families carry exact rational parameters (``fractions.Fraction``); numerical
values are produced at the precision of the active gmpy2 context.

The classification constants follow the canonical power-law form
``a_n = n**sigma * (1 + alpha/n)``, ``b_n = 2*gamma*n**sigma * (1 + beta/n)``:

* ``tau = 2*beta - 2*alpha + sigma``
* ``nu = -sign(gamma)`` (alternation factor of the Jost solution)
* ``s = -sigma/2 + 1/4``, ``delta = min(sigma, 2)``, ``varrho = min(sigma - 3/2, 1/2)``
"""

from __future__ import annotations

import csv
import enum
import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import ConfigError, DomainError, RangeError, UnsupportedError
from .scalednum import working_precision


class Variant(str, enum.Enum):
    POWERLAW = "powerlaw"
    LAGUERRE = "laguerre"
    HERMITE = "hermite"
    STIELTJES_CARLITZ = "stieltjes_carlitz"
    DUAL_HAHN = "dual_hahn"
    ZERO_DIAG_POWERLAW = "zero_diag_powerlaw"
    TABLE = "table"


class Cell(str, enum.Enum):
    NON_CRITICAL_REGULAR = "NonCriticalRegular"
    NON_CRITICAL_SINGULAR = "NonCriticalSingular"
    CRITICAL_REGULAR = "CriticalRegular"
    CRITICAL_SINGULAR_SUB = "CriticalSingularSub"
    CRITICAL_SINGULAR_SUPER = "CriticalSingularSuper"
    DOUBLY_CRITICAL_REGULAR = "DoublyCriticalRegular"
    DOUBLY_CRITICAL_SINGULAR = "DoublyCriticalSingular"

    @property
    def label(self) -> str:
        return _CELL_LABELS[self]

    @property
    def singular(self) -> bool:
        return "Singular" in self.value


_CELL_LABELS = {
    Cell.NON_CRITICAL_REGULAR: "non-critical regular",
    Cell.NON_CRITICAL_SINGULAR: "non-critical singular",
    Cell.CRITICAL_REGULAR: "critical regular",
    Cell.CRITICAL_SINGULAR_SUB: "critical singular subcritical",
    Cell.CRITICAL_SINGULAR_SUPER: "critical singular supercritical",
    Cell.DOUBLY_CRITICAL_REGULAR: "doubly-critical regular",
    Cell.DOUBLY_CRITICAL_SINGULAR: "doubly-critical singular",
}


def to_fraction(value) -> Fraction:
    """Exact rational from an int, float, decimal string or "p/q" string.

    Floats go through their shortest repr, so 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise ConfigError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse number {value!r}") from exc
    if isinstance(value, (mpq,)):
        return Fraction(int(value.numerator), int(value.denominator))
    raise ConfigError(f"expected a number, got {type(value).__name__}")


def _mp(q: Fraction) -> mpfr:
    return mpfr(mpq(q.numerator, q.denominator))


def _pow(n: int, e: Fraction) -> mpfr:
    if e.denominator == 1:
        return mpfr(n) ** int(e)
    if e.denominator == 2:
        return gmpy2.sqrt(mpfr(n) ** int(2 * e)) if e > 0 else 1 / gmpy2.sqrt(mpfr(n) ** int(-2 * e))
    return mpfr(n) ** _mp(e)


@dataclass(frozen=True)
class Asymptotics:
    """Exact canonical power-law constants (sigma, alpha, beta, gamma)."""

    sigma: Fraction
    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def as_dict(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("sigma", "alpha", "beta", "gamma")}


@dataclass(frozen=True)
class ZeroDiagShape:
    """Growth of a zero-diagonal sequence: a_n = (n/2)**(sigma/2) (1 + alpha_hat/n + ...)."""

    sigma: Fraction
    alpha_hat: Fraction


_PARAM_NAMES = {
    Variant.POWERLAW: ("sigma", "alpha", "beta", "gamma"),
    Variant.LAGUERRE: ("p",),
    Variant.HERMITE: (),
    Variant.STIELTJES_CARLITZ: ("k",),
    Variant.DUAL_HAHN: ("x", "y"),
    Variant.ZERO_DIAG_POWERLAW: ("sigma", "alpha_hat"),
    Variant.TABLE: (),
}


@dataclass(frozen=True, eq=False)
class CoefficientModel:
    """Immutable generator of the Jacobi coefficients (a_n, b_n).

    ``params`` holds exact rationals. ``table`` holds (a_n, b_n) rows for the
    Table variant. ``overrides`` replaces finitely many entries, which leaves
    the asymptotic metadata untouched. ``precision`` is the working precision
    in bits used by :func:`eval_coeffs`.
    """

    variant: Variant
    params: tuple = ()
    table: tuple | None = None
    precision: int = 256
    overrides: tuple = ()
    asymptotics_hint: Asymptotics | None = None
    zero_diag_hint: ZeroDiagShape | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        params = self.params
        if isinstance(params, Mapping):
            params = tuple(sorted((k, to_fraction(v)) for k, v in params.items()))
        else:
            params = tuple(sorted((k, to_fraction(v)) for k, v in params))
        object.__setattr__(self, "params", params)
        names = _PARAM_NAMES[self.variant]
        given = {k for k, _ in params}
        missing = [k for k in names if k not in given]
        extra = sorted(given - set(names))
        if missing:
            raise ConfigError(f"{self.variant.value}: missing parameters {missing}")
        if extra:
            raise ConfigError(f"{self.variant.value}: unknown parameters {extra}")
        if int(self.precision) < 2:
            raise ConfigError("precision must be at least 2 bits")
        self._validate()
        ov = tuple(sorted((int(n), to_fraction(a), to_fraction(b)) for n, a, b in self.overrides))
        for n, a, _ in ov:
            if n < 0 or a <= 0:
                raise ConfigError(f"override at n={n} needs n >= 0 and a > 0")
        object.__setattr__(self, "overrides", ov)

    def _validate(self):
        p = self.param
        v = self.variant
        if v is Variant.POWERLAW:
            if p("sigma") <= 0:
                raise ConfigError("sigma must be positive")
            if p("alpha") <= -1:
                raise ConfigError("alpha must exceed -1 so that a_n > 0")
        elif v is Variant.LAGUERRE:
            if p("p") <= -1:
                raise ConfigError("Laguerre parameter p must exceed -1")
        elif v is Variant.STIELTJES_CARLITZ:
            if p("k") <= 0:
                raise ConfigError("Stieltjes-Carlitz parameter k must be positive")
        elif v is Variant.DUAL_HAHN:
            if p("x") <= 0 or p("y") <= 0:
                raise ConfigError("dual Hahn parameters x, y must be positive")
        elif v is Variant.ZERO_DIAG_POWERLAW:
            if p("sigma") <= 0:
                raise ConfigError("sigma must be positive")
            if p("alpha_hat") <= -1:
                raise ConfigError("alpha_hat must exceed -1 so that a_n > 0")
        elif v is Variant.TABLE:
            if not self.table:
                raise ConfigError("table variant needs at least one row")
            for n, (a, b) in enumerate(self.table):
                if not a > 0:
                    raise ConfigError(f"table row {n}: a_n must be positive")

    # ------------------------------------------------------------------
    def param(self, key: str) -> Fraction:
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)

    @property
    def size(self) -> int | None:
        """Number of available indices (None for unbounded families)."""
        return len(self.table) if self.variant is Variant.TABLE else None

    @property
    def zero_diagonal(self) -> bool:
        if self.variant in (Variant.HERMITE, Variant.STIELTJES_CARLITZ, Variant.ZERO_DIAG_POWERLAW):
            return not any(b != 0 for _, _, b in self.overrides)
        if self.variant is Variant.TABLE:
            return all(b == 0 for _, b in self.table) and not any(b != 0 for _, _, b in self.overrides)
        return False

    def with_overrides(self, rows: Iterable) -> "CoefficientModel":
        return CoefficientModel(
            self.variant,
            self.params,
            self.table,
            self.precision,
            tuple(self.overrides) + tuple(rows),
            self.asymptotics_hint,
            self.zero_diag_hint,
            self.name,
        )

    def with_precision(self, bits: int) -> "CoefficientModel":
        return CoefficientModel(
            self.variant,
            self.params,
            self.table,
            bits,
            self.overrides,
            self.asymptotics_hint,
            self.zero_diag_hint,
            self.name,
        )

    # ------------------------------------------------------------------
    def pair(self, n: int):
        """(a_n, b_n) as mpfr at the active context precision."""
        if n < 0:
            raise RangeError(f"coefficient index {n} < 0")
        for m, a, b in self.overrides:
            if m == n:
                return _mp(a), _mp(b)
        v = self.variant
        p = self.param
        if v is Variant.POWERLAW:
            sigma, alpha, beta, gamma = p("sigma"), p("alpha"), p("beta"), p("gamma")
            if n == 0:
                return mpfr(1), _mp(2 * gamma)
            ns = _pow(n, sigma)
            return ns * _mp(1 + alpha / n), ns * _mp(2 * gamma * (1 + beta / n))
        if v is Variant.LAGUERRE:
            q = p("p")
            return gmpy2.sqrt(_mp((n + 1) * (n + 1 + q))), _mp(2 * n + q + 1)
        if v is Variant.HERMITE:
            return gmpy2.sqrt(_mp(Fraction(n + 1, 2))), mpfr(0)
        if v is Variant.STIELTJES_CARLITZ:
            k = p("k")
            return (_mp(k * (n + 1)) if n % 2 == 0 else mpfr(n + 1)), mpfr(0)
        if v is Variant.DUAL_HAHN:
            x, y = p("x"), p("y")
            a = gmpy2.sqrt(_mp((n + 1) * (n + x) * (n + y) * (n + x + y)))
            return a, _mp(2 * n * n + (2 * x + 2 * y - 1) * n + x * y)
        if v is Variant.ZERO_DIAG_POWERLAW:
            sigma, ah = p("sigma"), p("alpha_hat")
            if n == 0:
                return mpfr(1), mpfr(0)
            return _pow_rational_base(Fraction(n, 2), sigma / 2) * _mp(1 + ah / n), mpfr(0)
        if n >= len(self.table):
            raise RangeError(f"table has {len(self.table)} rows; index {n} out of range")
        a, b = self.table[n]
        return _to_mp(a), _to_mp(b)

    def arrays(self, n_end: int):
        """Cached lists holding at least a_0..a_{n_end-1} and b_0..b_{n_end-1}.

        Values are at the active context precision. The lists are shared
        with the cache and must not be modified.
        """
        prec = gmpy2.get_context().precision
        a_list, b_list = self._cache.get(prec, ([], []))
        if len(a_list) < n_end:
            if self.size is not None and n_end > self.size:
                raise RangeError(f"table has {self.size} rows; {n_end} requested")
            for n in range(len(a_list), n_end):
                a, b = self.pair(n)
                a_list.append(a)
                b_list.append(b)
            self._cache[prec] = (a_list, b_list)
        return a_list, b_list

    def a_at(self, n: int) -> mpfr:
        return self.arrays(n + 1)[0][n]

    # ------------------------------------------------------------------
    def asymptotics(self) -> Asymptotics:
        """Exact (sigma, alpha, beta, gamma) of the family, if known."""
        v = self.variant
        p = self.param
        half = Fraction(1, 2)
        if v is Variant.POWERLAW:
            return Asymptotics(p("sigma"), p("alpha"), p("beta"), p("gamma"))
        if v is Variant.LAGUERRE:
            q = p("p")
            return Asymptotics(Fraction(1), 1 + q / 2, (1 + q) / 2, Fraction(1))
        if v is Variant.DUAL_HAHN:
            s = p("x") + p("y")
            return Asymptotics(Fraction(2), s + half, s - half, Fraction(1))
        if v is Variant.HERMITE:
            return Asymptotics(half, half, Fraction(0), Fraction(0))
        if v is Variant.ZERO_DIAG_POWERLAW:
            return Asymptotics(p("sigma") / 2, p("alpha_hat"), Fraction(0), Fraction(0))
        if self.asymptotics_hint is not None:
            return self.asymptotics_hint
        raise UnsupportedError("classification requires family metadata")

    def zero_diag_shape(self) -> ZeroDiagShape | None:
        if self.variant is Variant.ZERO_DIAG_POWERLAW:
            return ZeroDiagShape(self.param("sigma"), self.param("alpha_hat"))
        if self.variant is Variant.HERMITE:
            return ZeroDiagShape(Fraction(1), Fraction(1, 2))
        return self.zero_diag_hint

    def describe(self) -> dict:
        """Stable JSON-ready descriptor used in run manifests."""
        out = {
            "variant": self.variant.value,
            "params": {k: str(v) for k, v in self.params},
            "precision_bits": int(self.precision),
        }
        if self.name:
            out["name"] = self.name
        if self.overrides:
            out["overrides"] = [[n, str(a), str(b)] for n, a, b in self.overrides]
        if self.table is not None:
            h = hashlib.sha256()
            for a, b in self.table:
                h.update(f"{_canon(a)},{_canon(b)}\n".encode())
            out["table_rows"] = len(self.table)
            out["table_sha256"] = h.hexdigest()
        if self.asymptotics_hint is not None:
            out["asymptotics"] = self.asymptotics_hint.as_dict()
        return out


def _pow_rational_base(x: Fraction, e: Fraction) -> mpfr:
    base = _mp(x)
    if e.denominator == 1:
        return base ** int(e)
    if e.denominator == 2:
        return gmpy2.sqrt(base ** int(2 * e)) if e > 0 else 1 / gmpy2.sqrt(base ** int(-2 * e))
    return base ** _mp(e)


def _to_mp(v) -> mpfr:
    if isinstance(v, Fraction):
        return _mp(v)
    return mpfr(v)


def _canon(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return mpfr(v).digits(16)[0] + "p" + str(mpfr(v).digits(16)[1])


# ----------------------------------------------------------------------
# Operations


def eval_coeffs(model: CoefficientModel, n: int, bits: int | None = None):
    """(a_n, b_n) at the model's working precision (or ``bits``)."""
    if n < 0:
        raise DomainError("coefficient index must be nonnegative")
    with working_precision(bits or model.precision):
        return model.pair(n)


def gamma_seq(model: CoefficientModel, n: int, bits: int | None = None) -> mpfr:
    """gamma_n = b_n / (2 sqrt(a_{n-1} a_n)), n >= 1."""
    if n < 1:
        raise DomainError("gamma_n needs n >= 1")
    with working_precision(bits or model.precision):
        a0, _ = model.pair(n - 1)
        a1, b1 = model.pair(n)
        return b1 / (2 * gmpy2.sqrt(a0 * a1))


def discreteness_margin(model: CoefficientModel, n: int, bits: int | None = None) -> mpfr:
    """s_n = |b_n| - a_{n-1} - a_n; growth to infinity signals discrete spectrum."""
    if n < 1:
        raise DomainError("the margin needs n >= 1")
    with working_precision(bits or model.precision):
        a0, _ = model.pair(n - 1)
        a1, b1 = model.pair(n)
        return abs(b1) - a0 - a1


@dataclass(frozen=True)
class Classification:
    gamma: Fraction
    nu: int
    sigma: Fraction
    tau: Fraction
    s: Fraction
    delta: Fraction
    varrho: Fraction
    cell: Cell
    alpha: Fraction
    beta: Fraction

    @property
    def critical(self) -> bool:
        return abs(self.gamma) == 1

    def as_dict(self) -> dict:
        def num(q):
            return {"exact": str(q), "value": float(q)}

        return {
            "cell": self.cell.value,
            "label": self.cell.label,
            "gamma": num(self.gamma),
            "nu": self.nu,
            "sigma": num(self.sigma),
            "alpha": num(self.alpha),
            "beta": num(self.beta),
            "tau": num(self.tau),
            "s": num(self.s),
            "delta": num(self.delta),
            "varrho": num(self.varrho),
        }

    def summary(self) -> str:
        return (
            f"{self.cell.label}, γ={_short(self.gamma)} σ={_short(self.sigma)} "
            f"τ={_short(self.tau)} ϱ={_short(self.varrho)}"
        )


def _short(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    f = float(q)
    return f"{f:g}"


def figure_cell(gamma: Fraction, sigma: Fraction, tau: Fraction) -> Cell:
    """Regular/singular cell; boundary values of sigma count as regular."""
    if abs(gamma) != 1:
        return Cell.NON_CRITICAL_REGULAR if sigma <= 1 else Cell.NON_CRITICAL_SINGULAR
    if tau != 0:
        if sigma <= Fraction(3, 2):
            return Cell.CRITICAL_REGULAR
        return Cell.CRITICAL_SINGULAR_SUB if tau < 0 else Cell.CRITICAL_SINGULAR_SUPER
    return Cell.DOUBLY_CRITICAL_REGULAR if sigma <= 2 else Cell.DOUBLY_CRITICAL_SINGULAR


def classify(model: CoefficientModel) -> Classification:
    """Exact classification constants and the regular/singular cell."""
    if model.variant is Variant.STIELTJES_CARLITZ or (
        model.variant is Variant.TABLE and model.asymptotics_hint is None
    ):
        raise UnsupportedError("classification requires family metadata")
    asy = model.asymptotics()
    sigma, alpha, beta, gamma = asy.sigma, asy.alpha, asy.beta, asy.gamma
    tau = 2 * beta - 2 * alpha + sigma
    # gamma = 0 has no sign; the alternating choice keeps nu in {-1, +1}
    nu = 1 if gamma < 0 else -1
    return Classification(
        gamma=gamma,
        nu=nu,
        sigma=sigma,
        tau=tau,
        s=-sigma / 2 + Fraction(1, 4),
        delta=min(sigma, Fraction(2)),
        varrho=min(sigma - Fraction(3, 2), Fraction(1, 2)),
        cell=figure_cell(gamma, sigma, tau),
        alpha=alpha,
        beta=beta,
    )


# ----------------------------------------------------------------------
# Configuration

_VARIANT_ALIASES = {
    "powerlaw": Variant.POWERLAW,
    "laguerre": Variant.LAGUERRE,
    "hermite": Variant.HERMITE,
    "stieltjescarlitz": Variant.STIELTJES_CARLITZ,
    "carlitz": Variant.STIELTJES_CARLITZ,
    "dualhahn": Variant.DUAL_HAHN,
    "zerodiagpowerlaw": Variant.ZERO_DIAG_POWERLAW,
    "zerodiag": Variant.ZERO_DIAG_POWERLAW,
    "table": Variant.TABLE,
}


def parse_variant(name) -> Variant:
    if isinstance(name, Variant):
        return name
    if not isinstance(name, str):
        raise ConfigError(f"variant must be a string, got {name!r}")
    key = name.lower().replace("_", "").replace("-", "").replace(" ", "")
    try:
        return _VARIANT_ALIASES[key]
    except KeyError:
        raise ConfigError(f"unknown variant {name!r}") from None


def read_table_csv(path) -> tuple:
    """Rows "n,a,b" with n = 0, 1, 2, ... (a header line is allowed)."""
    rows = []
    with open(path, newline="") as fh:
        for i, rec in enumerate(csv.reader(fh)):
            if not rec or rec[0].strip().startswith("#"):
                continue
            if i == 0 and not _looks_numeric(rec[0]):
                continue
            if len(rec) != 3:
                raise ConfigError(f"{path}: expected 3 columns n,a,b in line {i + 1}")
            n = int(rec[0])
            if n != len(rows):
                raise ConfigError(f"{path}: rows must be consecutive from 0 (got n={n})")
            rows.append((to_fraction(rec[1]), to_fraction(rec[2])))
    return tuple(rows)


def _looks_numeric(s: str) -> bool:
    try:
        int(s)
        return True
    except ValueError:
        return False


def model_from_config(cfg: Mapping, base_dir: str | None = None) -> CoefficientModel:
    """Build a model from a config mapping.

    Example: ``{"variant": "powerlaw", "sigma": 2.0, "alpha": 0.0, "beta": 1.0,
    "gamma": 1.0, "precision_bits": 256}``. Table configs give either
    ``"path"`` (CSV rows n,a,b) or inline ``"rows"``.
    """
    if not isinstance(cfg, Mapping):
        raise ConfigError("config must be a JSON object")
    if "variant" not in cfg:
        raise ConfigError("config needs a 'variant' key")
    variant = parse_variant(cfg["variant"])
    precision = cfg.get("precision_bits", 256)
    if not isinstance(precision, int) or isinstance(precision, bool) or precision < 2:
        raise ConfigError("precision_bits must be an integer >= 2")
    table = None
    if variant is Variant.TABLE:
        if "rows" in cfg:
            table = tuple((to_fraction(a), to_fraction(b)) for a, b in cfg["rows"])
        elif "path" in cfg or "csv" in cfg:
            path = cfg.get("path") or cfg.get("csv")
            if base_dir and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            if not os.path.exists(path):
                raise ConfigError(f"table file {path} not found")
            table = read_table_csv(path)
        else:
            raise ConfigError("table variant needs 'path' or 'rows'")
    names = _PARAM_NAMES[variant]
    params = {k: cfg[k] for k in names if k in cfg}
    known = set(names) | {"variant", "precision_bits", "rows", "path", "csv", "name", "overrides"}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ConfigError(f"unknown config keys {unknown}")
    return CoefficientModel(
        variant,
        params,
        table,
        precision,
        tuple(cfg.get("overrides", ())),
        name=str(cfg.get("name", "")),
    )


def load_model(path) -> CoefficientModel:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return model_from_config(cfg, base_dir=os.path.dirname(os.path.abspath(path)))


def powerlaw(sigma, tau=None, *, alpha=0, beta=None, gamma=1, precision=256) -> CoefficientModel:
    """PowerLaw model; give either ``beta`` or ``tau`` (then beta = (tau - sigma)/2 + alpha)."""
    sigma, alpha, gamma = to_fraction(sigma), to_fraction(alpha), to_fraction(gamma)
    if beta is None:
        if tau is None:
            raise ConfigError("give beta or tau")
        beta = (to_fraction(tau) - sigma) / 2 + alpha
    return CoefficientModel(
        Variant.POWERLAW,
        {"sigma": sigma, "alpha": alpha, "beta": to_fraction(beta), "gamma": gamma},
        precision=precision,
    )
