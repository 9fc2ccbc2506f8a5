"""Time the fiber kernels under the numba and pure-numpy backends.

    python benchmarks/bench_kernels.py --n 20000 --repeat 5
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from mirrorcell.kernels import load_backend


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="points per call")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--l", type=int, default=4)
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    n, k, ell, r = args.n, args.k, args.l, args.r
    Y = rng.standard_normal((n, ell)) + 1j * rng.standard_normal((n, ell))
    P = np.concatenate([rng.standard_normal((n, 1)) + 0j, Y], axis=1)
    z = rng.standard_normal(ell - 1) + 1j * rng.standard_normal(ell - 1)
    C = rng.standard_normal((12, ell)) + 0j
    a, b = Y[:, 0].copy(), Y[:, 1].copy()
    cases = {
        "map_f": (Y, k, r),
        "fiber_residual": (Y, z, k, r),
        "jacobian": (Y, k, r),
        "min_abs_forms": (Y, C),
        "homogeneous_residual": (P, z, k, r),
        "homogeneous_gradients": (P, z, k, r),
        "euler_terms": (a, b, z[:k], r),
    }
    backends = {"numpy": load_backend("numpy")}
    try:
        backends["numba"] = load_backend("numba")
    except ImportError:
        print("numba not importable; timing numpy only")
    print(f"n={n} k={k} l={ell} r={r}, best of {args.repeat}")
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for kernel, kargs in cases.items():
        row = {}
        for name, mod in backends.items():
            fn = getattr(mod, kernel)
            fn(*kargs)  # compile / warm up
            row[name] = best_of(fn, kargs, args.repeat)
        line = f"{kernel:<24}" + "".join(f"{row[name] * 1e3:>10.2f}ms" for name in backends)
        if "numba" in row:
            line += f"{row['numpy'] / row['numba']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
