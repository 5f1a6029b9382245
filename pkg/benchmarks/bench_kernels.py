"""Time the numba and numpy kernel paths on dense residual-Doppler grids.

    python benchmarks/bench_kernels.py [--sizes 100 400 1600] [--repeat 5]
"""

import argparse
import time

import numpy as np

from leo5g import _kernels

RE, R = 6371.0, 7871.0
SCALE = 20e9 / 299792.458 * 7.1163 * RE


def best_of(fn, repeat, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 400, 1600])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba not installed; only the numpy path is available")
    print(f"{'grid':>12} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8} {'max |diff| Hz':>14}")
    for n in args.sizes:
        gamma = np.linspace(0.0, 0.6, n)
        offsets = np.linspace(0.0, 10.0 / RE, n)
        t_np = best_of(_kernels.numpy_residual_grid, args.repeat, gamma, offsets, RE, R, SCALE)
        if _kernels.HAVE_NUMBA:
            _kernels.numba_residual_grid(gamma[:2], offsets[:2], RE, R, SCALE)  # compile outside the timing
            t_nb = best_of(_kernels.numba_residual_grid, args.repeat, gamma, offsets, RE, R, SCALE)
            diff = np.max(np.abs(_kernels.numba_residual_grid(gamma, offsets, RE, R, SCALE)
                                 - _kernels.numpy_residual_grid(gamma, offsets, RE, R, SCALE)))
            print(f"{n:>5}x{n:<6} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} {t_np / t_nb:8.1f} {diff:14.3e}")
        else:
            print(f"{n:>5}x{n:<6} {t_np * 1e3:12.2f} {'-':>12} {'-':>8} {'-':>14}")


if __name__ == "__main__":
    main()
