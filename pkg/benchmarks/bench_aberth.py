"""Time the compiled and pure-Python Aberth kernels on the same polynomials.

Usage: python benchmarks/bench_aberth.py [--degrees 40,80] [--bits 256,512] [--repeat 1]
"""

import argparse
import math
import time

import mpmath as mp

from planarop import _aberth_py
from planarop.geometry import ProblemParams
from planarop.lax import synthesize
from planarop.mpnum import PrecisionContext
from planarop.zeros import _initial_guesses

try:
    from planarop import _aberth
except ImportError:  # extension not built
    _aberth = None


def run(kernel, coeffs, z0, bits, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = kernel.aberth(coeffs, z0, bits, -(bits // 2), 500)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--degrees", default="40,80")
    ap.add_argument("--bits", default="256,512")
    ap.add_argument("--repeat", type=int, default=1)
    args = ap.parse_args()
    with mp.workprec(1024):
        a = +mp.sqrt(2)
    print(f"{'n':>4} {'bits':>5} {'python s':>9} {'cython s':>9} {'speedup':>8} {'max |diff|':>11}")
    for n in (int(x) for x in args.degrees.split(",")):
        for bits in (int(x) for x in args.bits.split(",")):
            P = synthesize(ProblemParams(a, 1, n), n, ctx=PrecisionContext(bits))[-1]
            z0 = _initial_guesses(P, n)
            tp, (rp, *_) = run(_aberth_py, P.coeffs, z0, bits, args.repeat)
            if _aberth is None:
                print(f"{n:>4} {bits:>5} {tp:>9.3f} {'n/a':>9}")
                continue
            tc, (rc, *_) = run(_aberth, P.coeffs, z0, bits, args.repeat)
            with mp.workprec(bits):
                diff = max(min(abs(x - y) for y in rc) for x in rp)
            print(f"{n:>4} {bits:>5} {tp:>9.3f} {tc:>9.3f} {tp / tc:>7.2f}x {mp.nstr(diff, 3):>11}")


if __name__ == "__main__":
    main()
