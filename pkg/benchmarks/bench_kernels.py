"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--h H]
"""

import argparse
import math
import timeit

from zcurv.cli import load, shipped
from zcurv.numeric import Grid, KnownSolution, integrate_backlund, integrate_lax
from zcurv.numeric import backend
from zcurv.transforms import lax_pair


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--h", type=float, default=0.01, help="grid spacing for the Backlund sweep")
    ap.add_argument("--steps", type=int, default=1000, help="RK4 steps per loop edge")
    args = ap.parse_args()

    pf = load(shipped("liouville_wave.json"))
    bt = pf.backlund["bt_u"]
    grid = Grid.square(0, 0, 1, 1, args.h)
    wave_zero = KnownSolution(("x", "y"), {"v": "0"})
    exact = KnownSolution(("x", "y"), {"u": "-2*log(4 - (x+y)/sqrt2)"}, "4 - (x+y)/sqrt2")
    pair = lax_pair(pf.gamma["Gamma"])
    w0 = -2 * math.log(4)

    cases = {
        f"integrate_backlund ({grid.nx}x{grid.ny})":
            lambda k: integrate_backlund(bt, wave_zero, w0, grid, kernels=k),
        f"integrate_lax ({args.steps} steps)":
            lambda k: integrate_lax(pair, exact, (0, 0, 1, 1), args.steps, kernels=k),
    }
    kernels = {"python": backend.fallback}
    if backend.compiled is not None:
        kernels["cython"] = backend.compiled
    else:
        print("compiled kernels not built; timing the fallback only")

    print(f"{'case':36s} {'backend':8s} {'best (s)':>10s}")
    for label, fn in cases.items():
        best = {}
        for name, k in kernels.items():
            best[name] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
            print(f"{label:36s} {name:8s} {best[name]:10.4f}")
        if len(best) == 2:
            print(f"{'':36s} speedup  {best['python'] / best['cython']:9.1f}x")


if __name__ == "__main__":
    main()
