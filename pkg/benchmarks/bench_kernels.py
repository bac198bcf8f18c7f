"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--n 200000] [--d 4] [--repeat 5]

Prints the best-of-``repeat`` wall time per kernel for each backend, the
speedup, and whether the two results are bitwise identical.
"""
import argparse
import timeit

import numpy as np

from ptcopula import kernels
from ptcopula.kernels import _pykernels

try:
    from ptcopula.kernels import _ckernels
except ImportError:
    _ckernels = None


def cases(n, d, rng):
    Z = rng.uniform(0.0, 2.0, (n, d))
    U = rng.random((n, d))
    u = np.full(d, 0.5)
    a = rng.random(d)
    P = rng.random((25, d))
    return {
        "row_max_scaled": lambda impl: kernels.row_max_scaled(Z, a, impl=impl),
        "row_min_scaled": lambda impl: kernels.row_min_scaled(Z, a, impl=impl),
        "thinned_row_max": lambda impl: kernels.thinned_row_max(Z, U, u, a, impl=impl),
        "count_dominated": lambda impl: kernels.count_dominated(U, P, impl=impl),
        "count_exceeding": lambda impl: kernels.count_exceeding(U, P, impl=impl),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--d", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    print(f"n={args.n} d={args.d} repeat={args.repeat}")
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}  identical")
    for name, fn in cases(args.n, args.d, rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:<18}{t_py:>12.2f}{'-':>13}{'-':>9}  -")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        same = fn(_pykernels).tobytes() == fn(_ckernels).tobytes()
        print(f"{name:<18}{t_py:>12.2f}{t_c:>13.2f}{t_py / t_c:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
