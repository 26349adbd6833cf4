#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot paths behind the library: the normalized Legendre table
(basis assembly) and the per-shift smallest singular value on a Schur
factor (pseudospectrum grids), plus the per-point full SVD those grids
would otherwise use.

    python benchmarks/bench_kernels.py [--lmax 80] [--points 4000]
                                       [--dim 200] [--shifts 256]
"""

import argparse
import time

import numpy as np
from scipy.linalg import schur, svdvals

from zollspec._kernels import _fallback, get_backend


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lmax", type=int, default=80)
    ap.add_argument("--points", type=int, default=4000)
    ap.add_argument("--dim", type=int, default=200)
    ap.add_argument("--shifts", type=int, default=256)
    args = ap.parse_args()

    core = get_backend("cython")
    rows = []

    x = np.linspace(-0.999, 0.999, args.points)
    t_py = timeit(lambda: _fallback.legendre_table(args.lmax, x))
    rows.append(("legendre_table "
                 f"(lmax={args.lmax}, {args.points} pts)", t_py, None))
    if core is not None:
        t_cy = timeit(lambda: core.legendre_table(args.lmax, x))
        rows[-1] = (rows[-1][0], t_py, t_cy)
        dev = np.max(np.abs(core.legendre_table(args.lmax, x)
                            - _fallback.legendre_table(args.lmax, x)))
        print(f"legendre backend agreement: max |diff| = {dev:.3e}")

    rng = np.random.default_rng(0)
    n = args.dim
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    T, _ = schur(A, output="complex")
    shifts = ((rng.standard_normal(args.shifts)
               + 1j * rng.standard_normal(args.shifts)) * np.sqrt(n))

    t_py = timeit(lambda: _fallback.triangular_sigma_min(T, shifts), repeats=1)
    label = f"sigma_min sweep (n={n}, {args.shifts} shifts)"
    if core is not None:
        t_cy = timeit(lambda: core.triangular_sigma_min(T, shifts), repeats=1)
        s_cy = core.triangular_sigma_min(T, shifts)
        s_py = _fallback.triangular_sigma_min(T, shifts)
        print(f"sigma_min backend agreement: max rel diff = "
              f"{np.max(np.abs(s_cy - s_py) / s_py):.3e}")
        rows.append((label, t_py, t_cy))
    else:
        rows.append((label, t_py, None))

    eye = np.eye(n)
    t_svd = timeit(
        lambda: [svdvals(A - lam * eye)[-1] for lam in shifts], repeats=1)
    rows.append((f"per-point full SVD baseline (n={n}, {args.shifts} shifts)",
                 t_svd, None))

    print()
    print(f"{'kernel':<52}{'numpy':>10}{'cython':>10}{'speedup':>9}")
    for label, t_py, t_cy in rows:
        if t_cy is not None:
            print(f"{label:<52}{t_py:>9.3f}s{t_cy:>9.3f}s{t_py / t_cy:>8.1f}x")
        else:
            print(f"{label:<52}{t_py:>9.3f}s{'-':>10}{'':>9}")
    if core is None:
        print("\ncompiled core not built; showing fallback timings only")


if __name__ == "__main__":
    main()
