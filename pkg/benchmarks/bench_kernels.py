"""Time the numba kernels against their numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--sizes 4 8 16] [--repeat 200]

Every call pair is also checked for identical results; the script exits
non-zero on a mismatch.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from tplkit import _accel


def _args(name, a, rng):
    n = a.shape[0]
    if name == "power_traces":
        return a, 8
    if name == "closed_path_count":
        return a, 6
    if name == "refine":
        return a, np.zeros(n, dtype=np.int64)
    return a, rng.permutation(n).astype(np.int64)


def _time(fn, cases, repeat):
    t0 = time.perf_counter()
    for _ in range(repeat):
        for args in cases:
            fn(*args)
    return (time.perf_counter() - t0) / (repeat * len(cases))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=0)
    ns = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba unavailable (or TPLKIT_NUMBA=0); nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(ns.seed)
    print(f"{'kernel':<18} {'n':>4} {'numpy us':>10} {'numba us':>10} {'speedup':>8}")
    bad = 0
    for name, np_fn in _accel.NUMPY_KERNELS.items():
        nb_fn = _accel.NUMBA_KERNELS[name]
        for n in ns.sizes:
            mats = [(rng.random((n, n)) < ns.density).astype(np.int64) for _ in range(8)]
            cases = [_args(name, a, rng) for a in mats]
            for args in cases:  # warm the JIT and compare outputs
                if not np.array_equal(np.asarray(np_fn(*args)), np.asarray(nb_fn(*args))):
                    bad += 1
            t_np = _time(np_fn, cases, ns.repeat)
            t_nb = _time(nb_fn, cases, ns.repeat)
            print(f"{name:<18} {n:>4} {t_np * 1e6:>10.1f} {t_nb * 1e6:>10.1f} {t_np / t_nb:>7.1f}x")
    if bad:
        print(f"{bad} result mismatches", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
