"""Time F_p row reduction with the compiled kernel and with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 5]
"""

import argparse
import time

import numpy as np

from itdist import linalg as la


def bench(kernel, A, p, repeat):
    la.use_kernel(kernel)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        la.rref(A, p)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--p", type=int, default=101)
    ap.add_argument("--density", type=float, default=0.3)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    kernels = ["python"]
    try:
        la.use_kernel("cython")
        kernels.insert(0, "cython")
    except (ImportError, ValueError):
        print("compiled kernel unavailable; timing the fallback only")

    print(f"{'n':>6} " + " ".join(f"{k:>12}" for k in kernels) + ("     speedup" if len(kernels) == 2 else ""))
    for n in args.sizes:
        A = rng.integers(0, args.p, size=(n, n)) * (rng.random((n, n)) < args.density)
        times = [bench(k, A, args.p, args.repeat) for k in kernels]
        row = f"{n:>6} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f" {times[1] / times[0]:>10.1f}x"
        print(row)
    la.use_kernel(kernels[0])


if __name__ == "__main__":
    main()
