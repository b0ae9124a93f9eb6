"""Compare the numba kernels with their numpy twins.

Run: python3 benchmarks/bench_kernels.py [--repeat N]
Both backends are called explicitly, so MLDD_DISABLE_NUMBA is ignored here.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from mldd import _kernels


def timed(fn, repeat):
    fn()                                    # warm-up (and JIT compile)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng):
    n = 4
    codes = np.arange(1 << (n * n), dtype=np.int64)
    maps = _kernels._edge_maps(n, _kernels.permutations(n))
    yield "orbit_min n=4 (65536 relations)", \
        lambda nb: _kernels.orbit_min_mask(codes, maps, use_numba=nb)

    rel = rng.random((200_000, 4, 4)) < 0.4
    val = rng.random((200_000, 4)) < 0.5
    yield "diamond batch 200k x 4", lambda nb: _kernels.diamond(rel, val, use_numba=nb)
    yield "diff batch 200k x 4", lambda nb: _kernels.diff(val, use_numba=nb)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba unavailable: only the numpy backend can be timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':36s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, fn in cases(rng):
        t_np = timed(lambda: fn(False), args.repeat)
        if _kernels.HAVE_NUMBA:
            assert np.array_equal(fn(False), fn(True)), name
            t_nb = timed(lambda: fn(True), args.repeat)
            print(f"{name:36s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:36s} {t_np:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
