"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--n 20000] [--bits 256] [--repeat 3]

Both backends get identical inputs; the script also checks that they return
identical values before reporting timings.
"""

import argparse
import json
import statistics
import time

from gmpy2 import mpc, mpfr

from jacobi_jost import _pykernels
from jacobi_jost.coeffs import powerlaw
from jacobi_jost.scalednum import working_precision

try:
    from jacobi_jost import _ckernels
except ImportError:
    _ckernels = None


def _cases(n, bits):
    model = powerlaw(2, tau=4)
    with working_precision(bits):
        a, b = model.arrays(n + 1)
        z = mpc("0.3+1.1j")
        half = mpfr(1) / 2
        X = [mpc(1) / (k + 1) for k in range(n + 2)]
        R = [mpc(1) / (k + 1) ** 2 for k in range(n + 2)]
    diag = [float(v) for v in b[:n]]
    off2 = [float(v) ** 2 for v in a[: n - 1]]
    return {
        "forward_recurrence": lambda k: k.forward_recurrence(a, b, z, mpc(0), mpc(1), half, n),
        "backward_recurrence": lambda k: k.backward_recurrence(a, b, z, mpc(0), mpc(1), n, half),
        "volterra_suffix": lambda k: k.volterra_suffix(X, R, mpc(1), mpc(0), n),
        "sturm_count": lambda k: [k.sturm_count(diag, off2, x) for x in (1.0, 50.0, 1e3, 1e5)],
    }


def _time(fn, repeat, bits):
    runs = []
    out = None
    for _ in range(repeat):
        with working_precision(bits):
            t = time.perf_counter()
            out = fn()
            runs.append(time.perf_counter() - t)
    return statistics.median(runs), out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--bits", type=int, default=256)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", action="store_true", help="print machine-readable results")
    args = p.parse_args()

    rows = []
    for name, call in _cases(args.n, args.bits).items():
        t_py, out_py = _time(lambda: call(_pykernels), args.repeat, args.bits)
        row = {"kernel": name, "python_s": t_py}
        if _ckernels is not None:
            t_c, out_c = _time(lambda: call(_ckernels), args.repeat, args.bits)
            row.update(cython_s=t_c, speedup=t_py / t_c, identical=out_py == out_c)
        rows.append(row)

    if args.json:
        print(json.dumps({"n": args.n, "bits": args.bits, "results": rows}, indent=2))
        return
    print(f"n={args.n} bits={args.bits} repeat={args.repeat}")
    if _ckernels is None:
        print("compiled kernels not available; showing the pure-Python timings only")
    print(f"{'kernel':<22}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}  identical")
    for r in rows:
        if "cython_s" in r:
            print(f"{r['kernel']:<22}{r['python_s']:>12.4f}{r['cython_s']:>12.4f}{r['speedup']:>9.1f}x  {r['identical']}")
        else:
            print(f"{r['kernel']:<22}{r['python_s']:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
