"""Command-line front end.

    jacobi-jost classify powerlaw sigma=2 alpha=0 beta=1
    jacobi-jost eigs powerlaw σ=2 τ=4 --interval -5 40
    jacobi-jost poly laguerre p=0 --z 0 --n-max 20 --format csv
    jacobi-jost asym model.json --z 1 --out asym.json

The model is either a JSON config file or a family name followed by
key=value parameters. Every report embeds a run manifest; with ``--out`` a
sidecar ``<out>.manifest.json`` records the sha256 of each file written, and
``jacobi-jost replay <manifest>`` reruns the command and compares hashes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from . import __version__
from .coeffs import (
    CoefficientModel,
    Variant,
    classify,
    load_model,
    model_from_config,
    parse_variant,
    to_fraction,
)
from .errors import ConfigError, DomainError, JostError, VerificationError
from .recurrence import default_bits, forward_polynomials
from .scalednum import PrecisionPolicy, as_mpc, format_real, working_precision

DEFAULT_TOL = 1e-20

_GREEK = {"σ": "sigma", "τ": "tau", "α": "alpha", "β": "beta", "γ": "gamma", "α̂": "alpha_hat"}


# ----------------------------------------------------------------------
# argument parsing helpers


def parse_z(text: str) -> complex:
    """"re+imi" style complex numbers: 1, -2.5, 1+2i, 3-0.5i, i, -i, 1e-3i."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not s:
        raise ConfigError("empty --z")
    s = re.sub(r"(^|[+-])i$", r"\g<1>1i", s)
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r} (expected e.g. 1+2i)") from None


def model_from_tokens(tokens, precision: int | None = None) -> CoefficientModel:
    """A config path, or a family name followed by key=value parameters."""
    if not tokens:
        raise ConfigError("missing model")
    head = tokens[0]
    if len(tokens) == 1 and (head.endswith(".json") or os.path.exists(head)):
        model = load_model(head)
    else:
        variant = parse_variant(head)
        cfg = {"variant": variant.value}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise ConfigError(f"expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            cfg[_GREEK.get(k.strip(), k.strip())] = v.strip()
        if variant is Variant.POWERLAW:
            cfg.setdefault("alpha", "0")
            cfg.setdefault("gamma", "1")
            if "tau" in cfg:
                if "beta" in cfg:
                    raise ConfigError("give beta or tau, not both")
                if "sigma" not in cfg:
                    raise ConfigError("powerlaw needs sigma")
                tau = to_fraction(cfg.pop("tau"))
                beta = (tau - to_fraction(cfg["sigma"])) / 2 + to_fraction(cfg["alpha"])
                cfg["beta"] = str(beta)
        if variant is Variant.ZERO_DIAG_POWERLAW:
            cfg.setdefault("alpha_hat", "0")
        model = model_from_config(cfg)
    if precision is not None:
        if precision < 16:
            raise ConfigError("--precision must be at least 16 bits")
        model = model.with_precision(precision)
    return model


# ----------------------------------------------------------------------
# manifest and output


@dataclass
class RunManifest:
    command: str
    argv: list
    model: dict
    params: dict
    precision: dict
    outputs: list = field(default_factory=list)

    def as_dict(self, with_outputs: bool = True) -> dict:
        out = {
            "command": self.command,
            "argv": list(self.argv),
            "model": self.model,
            "params": self.params,
            "precision": self.precision,
            "version": __version__,
        }
        if with_outputs:
            out["outputs"] = list(self.outputs)
        return out


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, type(gmpy2.mpfr(0))):
        return format_real(o, 30)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, default=_json_default) + "\n"


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass
class Result:
    report: dict
    summary: str
    csv_header: list | None = None
    csv_rows: list | None = None
    ok: bool = True
    failure: str = ""


def _emit(args, manifest: RunManifest, res: Result) -> int:
    res.report["manifest"] = manifest.as_dict(with_outputs=False)
    if args.format == "csv":
        if res.csv_header is None:
            flat = _flatten(res.report)
            text = rows_to_csv(["key", "value"], flat)
        else:
            text = rows_to_csv(res.csv_header, res.csv_rows)
    else:
        text = dumps(res.report)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        manifest.outputs = [{"path": os.path.basename(args.out), "sha256": _sha256(args.out)}]
        with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
            fh.write(dumps(manifest.as_dict()))
        print(res.summary)
    else:
        sys.stdout.write(text)
        print(res.summary, file=sys.stderr)
    if not res.ok:
        print(f"verification failed: {res.failure}", file=sys.stderr)
        return VerificationError.exit_code
    return 0


def _flatten(d, prefix=""):
    out = []
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(_flatten(v, key + "."))
        elif isinstance(v, list):
            out.append((key, json.dumps(v, default=_json_default, ensure_ascii=False)))
        else:
            out.append((key, v))
    return out


def _c(z) -> list:
    return [float(z.real), float(z.imag)]


def _fr(x, digits=20) -> str:
    return format_real(x, digits)


# ----------------------------------------------------------------------
# commands


def cmd_classify(model: CoefficientModel, args) -> Result:
    cls = classify(model)
    rep = {"classification": cls.as_dict(), "summary": cls.summary()}
    return Result(rep, cls.summary())


def cmd_poly(model: CoefficientModel, args) -> Result:
    z = _z_arg(args, 0)
    N = args.n_max if args.n_max is not None else 20
    bits = default_bits(model, N)
    P = forward_polynomials(model, z, N, bits=bits)
    rows = []
    with working_precision(bits):
        for n in range(N + 1):
            v = P[n]
            a = abs(v)
            lg = "-inf" if a == 0 else _fr(gmpy2.log10(a), 15)
            rows.append((n, _fr(v.real), _fr(v.imag), _fr(a), lg))
    rep = {
        "z": _c(z),
        "n_max": N,
        "bits": bits,
        "P": [{"n": r[0], "re": r[1], "im": r[2], "abs": r[3]} for r in rows],
    }
    return Result(rep, f"P_0..P_{N} at z={z}", ["n", "re", "im", "abs", "log10_abs"], rows)


def cmd_jost(model: CoefficientModel, args) -> Result:
    from .jost import jost_report, jost_solution

    z = _z_arg(args, 0)
    js = jost_solution(model, z, tol=args.tol, N=args.n_max)
    rep = jost_report(js)
    rows = []
    with working_precision(js.bits):
        for n in range(js.f.start, js.f.end + 1):
            v = js.f[n]
            a = abs(v)
            lg = "-inf" if a == 0 else _fr(gmpy2.log10(a), 15)
            rows.append((n, _fr(v.real), _fr(v.imag), lg))
    return Result(rep, f"Omega({z}) = {rep['omega']}", ["n", "re", "im", "log10_abs"], rows)


def _interval(args):
    if args.interval is None:
        raise ConfigError("--interval LO HI is required")
    lo, hi = args.interval
    if not lo < hi:
        raise ConfigError("--interval needs LO < HI")
    return lo, hi


def cmd_eigs(model: CoefficientModel, args) -> Result:
    from .spectral import converged_truncation, jost_zero_scan

    interval = _interval(args)
    rep = {"interval": list(interval)}
    jz = tr = None
    if args.method in ("both", "jost"):
        jz = jost_zero_scan(model, interval, tol=args.eig_tol, workers=args.threads)
        rep["jost_zeros"] = jz.as_dict()
    if args.method in ("both", "truncation"):
        tr = converged_truncation(model, interval, shift_tol=args.shift_tol)
        rep["truncation"] = tr.as_dict()
    rows = []
    ok, failure = True, ""
    if jz is not None and tr is not None:
        a, b = jz.values, tr.values
        if len(a) != len(b):
            ok, failure = False, f"methods disagree on the count: {len(a)} Jost zeros vs {len(b)} eigenvalues"
        pairs = list(zip(a, b))
        for k, (x, y) in enumerate(pairs):
            rows.append((k, repr(x), repr(y), repr(abs(x - y))))
        dmax = max((abs(x - y) for x, y in pairs), default=0.0)
        rep["agreement"] = {
            "pairs": [{"k": r[0], "jost": x, "truncation": y, "delta": abs(x - y)} for r, (x, y) in zip(rows, pairs)],
            "max_abs_delta": dmax,
            "tolerance": args.agree_tol,
        }
        if ok and dmax > args.agree_tol:
            ok, failure = False, f"max |dlambda| = {dmax:.3e} exceeds {args.agree_tol:g}"
        table = "\n".join(f"  {k:3d}  {x:.15g}  {y:.15g}  {abs(x - y):.2e}" for k, (x, y) in enumerate(pairs))
        summary = f"{len(pairs)} eigenvalues in [{interval[0]:g}, {interval[1]:g}], max |dlambda| = {dmax:.3e}\n{table}"
        header = ["k", "jost_zero", "truncation", "abs_delta"]
    else:
        src = jz or tr
        rows = [(k, repr(v)) for k, v in enumerate(src.values)]
        summary = f"{len(rows)} eigenvalues in [{interval[0]:g}, {interval[1]:g}] ({src.method.value})"
        header = ["k", "lambda"]
    return Result(rep, summary, header, rows, ok, failure)


def cmd_weights(model: CoefficientModel, args) -> Result:
    from .spectral import jost_zero_scan, spectral_weights

    interval = _interval(args)
    jz = jost_zero_scan(model, interval, tol=args.eig_tol, workers=args.threads)
    ws = [spectral_weights(model, lam) for lam in jz.values]
    total = math.fsum(w["w_jost"] for w in ws)
    rows = [(k, w["lambda_hp"], repr(w["w_jost"]), repr(w["w_sum"]), repr(w["relative_disagreement"])) for k, w in enumerate(ws)]
    rep = {"interval": list(interval), "weights": ws, "partial_sum": total, "count": len(ws)}
    summary = f"{len(ws)} weights, partial sum {total:.12f}"
    return Result(rep, summary, ["k", "lambda", "w_jost", "w_sum", "relative_disagreement"], rows)


def cmd_asym(model: CoefficientModel, args) -> Result:
    import numpy as np

    from .jost import asymptotic_constants, conjugate_jost, jost_report, jost_solution, reconstruction_error
    from .recurrence import second_solution

    z = _z_arg(args, 0)
    cls = classify(model)
    N = args.n_max if args.n_max is not None else 2000
    js = jost_solution(model, z, tol=args.tol, N=N)
    partner = conjugate_jost(js) if cls.tau < 0 else second_solution(model, js.f)
    P = forward_polynomials(model, z, js.f.end, bits=js.bits)
    consts = asymptotic_constants(model, z, js, partner=partner, P=P)
    rep = jost_report(js, consts)
    lo, hi = min(100, N // 10), min(1000, js.f.end - 1)
    ns = np.unique(np.geomspace(max(lo, 1), hi, 24).astype(int))
    err = reconstruction_error(model, P, js.f, partner, consts, ns)
    rep["reconstruction"] = {"n": ns.tolist(), "relative_error": err.tolist(), "max": float(err.max())}
    rows = [(int(n), repr(float(e))) for n, e in zip(ns, err)]
    if cls.tau < 0:
        with working_precision(js.bits):
            kp, km = consts.kappa_plus, consts.kappa_minus
            resid = float(abs(km - kp.conjugate()) / abs(kp))
        rep["conj_symmetry_residual"] = resid if z.imag == 0 else None
        summary = f"kappa+ = {complex(kp):.15g}, kappa- = {complex(km):.15g}"
        if z.imag == 0:
            summary += f", |kappa- - conj kappa+|/|kappa+| = {resid:.2e}"
    else:
        summary = f"Omega = {rep['omega']}, leading coefficient {complex(consts.kappa_leading):.12g}"
    return Result(rep, summary, ["n", "relative_error"], rows)


def cmd_dediag(model: CoefficientModel, args) -> Result:
    from . import dediag

    check = args.check
    N = args.n_max
    if check == "identity":
        N = 50 if N is None else N
        pair = dediag.dediagonalize(model, N + 2)
        z = _z_arg(args, 2.3)
        reps = {s: dediag.polynomial_identity_check(pair, s, z, N) for s in (dediag.PLUS, dediag.MINUS) if not (s == dediag.MINUS and z == 0)}
        rows = [(s, r["max_residual_log10"]) for s, r in reps.items()]
        summary = ", ".join(f"{s}: log10 residual {r['max_residual_log10']:.1f}" for s, r in reps.items())
        return Result({"identity": reps}, summary, ["sign", "max_residual_log10"], rows)
    if check == "interleave":
        N = 12 if N is None else N
        rep = dediag.interleaving_check(model, N)
        ok = rep["interlaced"] and max(rep["plus_vs_even_squares"], rep["minus_vs_odd_squares"]) <= 1e-20
        rows = [(k, repr(p), repr(m)) for k, (p, m) in enumerate(zip(rep["plus"], rep["minus"]))]
        summary = f"interlaced={rep['interlaced']}, deviations {rep['plus_vs_even_squares']:.1e} / {rep['minus_vs_odd_squares']:.1e}"
        return Result(rep, summary, ["k", "plus", "minus"], rows, ok, "" if ok else "squared spectra do not interleave")
    # asymptotic checks work on the derived operator of the requested sign
    sign = args.sign
    N = (10**4 if check == "regular" else 20000) if N is None else N
    target = model
    if model.zero_diagonal:
        target = dediag.dediagonalize(model, N + 2).model(sign)
    if check == "regular":
        lam = _z_arg(args, 1).real
        rep = dediag.regular_asymptotics_check(target, lam=lam, N=N, n_lo=max(10, N // 100))
        text = dediag.crossing_table_csv(rep)
        rows = [r.split(",") for r in text.strip().splitlines()[1:]]
        summary = f"mean spacing {rep['mean_spacing']} vs pi/sqrt(lambda) = {rep['target_spacing']:.6f}"
        return Result(rep, summary, ["k", "t_crossing", "spacing"], rows)
    z = _z_arg(args, 1)
    rep = dediag.singular_flat_check(target, z=z, N=N)
    rows = [(r["from"], r["to"], repr(r["relative_increment"])) for r in rep["cauchy_increments"]]
    summary = "Cauchy increments " + ", ".join(f"{r['relative_increment']:.2e}" for r in rep["cauchy_increments"])
    return Result(rep, summary, ["from", "to", "relative_increment"], rows)


def _z_arg(args, default) -> complex:
    z = args.z if args.z is not None else complex(default)
    with working_precision(64):
        as_mpc(z)
    return z


COMMANDS = {
    "classify": cmd_classify,
    "jost": cmd_jost,
    "poly": cmd_poly,
    "eigs": cmd_eigs,
    "weights": cmd_weights,
    "asym": cmd_asym,
    "dediag": cmd_dediag,
}


# ----------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(ConfigError.exit_code)


def _zflag(text):
    try:
        return parse_z(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jacobi-jost", description="Jost solutions and spectra of Jacobi operators.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("model", nargs="+", help="config.json, or a family name and key=value parameters")
    common.add_argument("--z", type=_zflag, default=None, help='spectral parameter, e.g. "1+2i"')
    common.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    common.add_argument("--n-max", type=int, default=None, dest="n_max")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--precision", type=int, default=None, help="base precision in bits (default 256)")
    common.add_argument("--out", default=None, help="write the report here (plus a .manifest.json sidecar)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("eigs", "weights"):
            sp.add_argument("--eig-tol", type=float, default=1e-12, dest="eig_tol")
        if name == "eigs":
            sp.add_argument("--method", choices=("both", "jost", "truncation"), default="both")
            sp.add_argument("--shift-tol", type=float, default=1e-9, dest="shift_tol")
            sp.add_argument("--agree-tol", type=float, default=1e-8, dest="agree_tol")
        if name == "dediag":
            sp.add_argument("--check", choices=("identity", "interleave", "regular", "singular"), default="identity")
            sp.add_argument("--sign", choices=("+", "-"), default="+")

    rp = sub.add_parser("replay")
    rp.add_argument("manifest")
    return p


def _replay(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            man = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))
    expected = {o["path"]: o["sha256"] for o in man.get("outputs", [])}
    argv = list(man["argv"])
    cwd = os.getcwd()
    os.chdir(base)
    try:
        code = main(argv)
        if code != 0:
            return code
        bad = [p for p, h in expected.items() if _sha256(p) != h]
    finally:
        os.chdir(cwd)
    if bad:
        print(f"replay mismatch: {bad}", file=sys.stderr)
        return VerificationError.exit_code
    print(f"replay reproduced {len(expected)} file(s) byte for byte")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            return _replay(args.manifest)
        model = model_from_tokens(args.model, args.precision)
        if args.n_max is not None and args.n_max < 0:
            raise DomainError("--n-max must be non-negative")
        if args.threads < 1:
            raise ConfigError("--threads must be positive")
        stored = list(argv)
        if args.out:
            # the manifest lives next to the output, so record the output by name
            i = stored.index("--out") if "--out" in stored else None
            if i is not None:
                stored[i + 1] = os.path.basename(args.out)
        if len(args.model) == 1 and os.path.exists(args.model[0]):
            stored[stored.index(args.model[0])] = os.path.abspath(args.model[0])
        params = {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("model", "command", "out", "threads") and v is not None
        }
        if "z" in params:
            params["z"] = [params["z"].real, params["z"].imag]
        policy = PrecisionPolicy(model.precision, args.n_max or 10**4)
        manifest = RunManifest(args.command, stored, model.describe(), params, policy.as_dict())
        res = COMMANDS[args.command](model, args)
        return _emit(args, manifest, res)
    except JostError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
