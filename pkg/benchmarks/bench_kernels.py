"""Compare the compiled kernels against the pure-Python fallback.

Times one banded matvec, one Chebyshev exponential step and one Cayley
(Crank-Nicolson) solve on the reference grid, checks that both backends
agree, and prints a table. Usage::

    python3 benchmarks/bench_kernels.py [--n 1024] [--order 10] [--repeat 5] [--csv out.csv]
"""
import argparse
import csv
import sys
import timeit

import numpy as np

from quadshift import _pykernels
from quadshift.model import CoefficientSet, GaussianPacketSpec, Grid, make_packet
from quadshift.propagator import build_generator, chebyshev_coefficients

try:
    from quadshift import _ckernels
except ImportError:
    _ckernels = None


def best_time(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description="Benchmark compiled vs fallback kernels")
    parser.add_argument("--n", type=int, default=1024, help="grid points (power of two)")
    parser.add_argument("--order", type=int, default=10, help="stencil order")
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--csv", help="also write the table here")
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation` first")
        return 1

    grid = Grid(-20.0, 20.0, args.n)
    co = CoefficientSet.from_constants(1.0, 0.2, 0.5, 0.4, 0.8)
    op = build_generator(co, grid, 0.0, stencil_order=args.order)
    v = np.array(make_packet(GaussianPacketSpec(x0=-1.0, p0=0.5, chirp=0.1), grid).amplitudes)
    coef, center, half = chebyshev_coefficients(op, args.dt, 1.0)
    tau = 0.5 * args.dt

    cases = {
        "band_matvec": lambda m: m.band_matvec(op.diag, op.upper, v),
        "chebyshev_step": lambda m: m.chebyshev_apply(op.diag, op.upper, v, center, half, coef),
        "cayley_solve": lambda m: m.cayley_solve(op.diag, op.upper, v, tau),
    }

    rows = []
    for name, call in cases.items():
        diff = float(np.max(np.abs(call(_ckernels) - call(_pykernels))))
        number = 3 if name == "cayley_solve" else 50
        t_py = best_time(lambda: call(_pykernels), args.repeat, number)
        t_c = best_time(lambda: call(_ckernels), args.repeat, number)
        rows.append((name, t_c * 1e3, t_py * 1e3, t_py / t_c, diff))

    print(f"n={args.n} stencil_order={args.order} chebyshev_terms={len(coef)}")
    print(f"{'kernel':16s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, tc, tp, sp, d in rows:
        print(f"{name:16s} {tc:10.4f} {tp:10.4f} {sp:8.1f} {d:11.2e}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kernel", "cython_ms", "python_ms", "speedup", "max_abs_diff"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
