"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--T 1000000] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from rhomix import _pykernels

try:
    from rhomix import _ckernels
except ImportError:
    _ckernels = None


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    cases = []
    for p in (1, 4, 16):
        A = np.ascontiguousarray(0.5 * np.linalg.qr(rng.standard_normal((p, p)))[0])
        T = args.T if p == 1 else args.T // p
        E = rng.standard_normal((T, p))
        cases.append(("var_filter p=%-2d T=%d" % (p, T), "var_filter", (A, np.zeros(p), E)))
    n, bins = args.T, 20
    cx = rng.integers(0, bins, n)
    cy = rng.integers(0, bins, n)
    cases.append(("contingency n=%d bins=%d" % (n, bins), "contingency_phi2", (cx, cy, bins)))

    print("%-34s %12s %12s %9s" % ("kernel", "python [s]", "cython [s]", "speedup"))
    for label, name, a in cases:
        tp = bench(getattr(_pykernels, name), a, args.repeat)
        if _ckernels is None:
            print("%-34s %12.4f %12s %9s" % (label, tp, "n/a", "n/a"))
            continue
        tc = bench(getattr(_ckernels, name), a, args.repeat)
        agree = np.allclose(getattr(_pykernels, name)(*a), getattr(_ckernels, name)(*a),
                            rtol=1e-12, atol=1e-12)
        print("%-34s %12.4f %12.4f %8.1fx%s" % (label, tp, tc, tp / tc, "" if agree else "  MISMATCH"))


if __name__ == "__main__":
    main()
