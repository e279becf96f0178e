"""Time the compiled and pure-Python Jacobi kernels on random complex matrices.

Usage: python benchmarks/bench_svd.py [--repeat N] [--sizes 4,8,16,32]
"""
import argparse
import timeit

import numpy as np

from loccsum import numerics


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--sizes", default="4,8,16,32")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    kernels = sorted(numerics.KERNELS)
    if "compiled" not in kernels:
        print("compiled kernel not built; timing the python fallback only")
    rng = np.random.default_rng(0)
    print(f"{'size':>6} " + " ".join(f"{k + ' ms':>12}" for k in kernels) + ("  speedup" if len(kernels) > 1 else ""))
    for n in sizes:
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        times = {}
        for k in kernels:
            number = max(1, 200 // n)
            best = min(timeit.repeat(lambda: numerics.svd(m, k), number=number, repeat=args.repeat))
            times[k] = 1e3 * best / number
        line = f"{n:>6} " + " ".join(f"{times[k]:>12.3f}" for k in kernels)
        if len(kernels) > 1:
            line += f"  {times['python'] / times['compiled']:7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
