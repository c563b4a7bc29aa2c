"""Compare the compiled and numpy kernel backends on the enumeration hot spots.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--sizes 12,16,20]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from gbmech import kernels
from gbmech.oracle import optimal_allocation  # noqa: F401  (warms imports)


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best * 1000


def cases(m: int, rng: np.random.Generator):
    r, ell = rng.uniform(0, 4, m), rng.uniform(0, 4, m)
    yield "star_best_lp p=2", lambda k: k.star_best_lp(r, ell, 2.0)
    yield "star_best_lp p=1.5", lambda k: k.star_best_lp(r, ell, 1.5)
    yield "star_lp_leaf_threshold", lambda k: k.star_lp_leaf_threshold(r, ell, 2.0, 0, 3.0)
    yield "star_oracle makespan", lambda k: k.star_oracle(r, ell, kernels.KIND_MAKESPAN)
    # hyperstar with two roots: 3^t assignments, t chosen to stay comparable
    t = max(1, int(m * 0.63))
    opt_machine = np.tile(np.array([0, 1, 2 + 0], dtype=np.int64), (t, 1))
    opt_machine[:, 2] = 2 + np.arange(t)
    opt_cost = rng.uniform(0, 4, (t, 3))
    n_opts = np.full(t, 3, dtype=np.int64)
    yield f"assign_oracle k=2 tasks={t}", lambda k: k.assign_oracle(
        opt_machine, opt_cost, n_opts, 2 + t, kernels.KIND_MAKESPAN)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="12,16,20")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = {name: kernels.load_backend(name) for name in kernels.available_backends()}
    print(f"backends: {', '.join(backends)} (default {kernels.BACKEND})")
    header = f"{'m':>3}  {'kernel':<30}" + "".join(f"{b + ' ms':>14}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for m in (int(s) for s in args.sizes.split(",")):
        rng = np.random.default_rng(args.seed + m)
        for label, fn in cases(m, rng):
            times = {b: _time(lambda: fn(mod), args.repeat) for b, mod in backends.items()}
            line = f"{m:>3}  {label:<30}" + "".join(f"{t:>14.2f}" for t in times.values())
            if len(times) == 2:
                line += f"{times['python'] / times['cython']:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
