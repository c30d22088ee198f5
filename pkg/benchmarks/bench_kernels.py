"""Timing comparison of the compiled slate kernel against the numpy fallback.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py [--pool 25] [--slots 10] [--rounds 20000]

Both backends are exercised on identical pre-drawn inputs and their outputs
are cross-checked before timing, so the speedup figure describes two
implementations of the same function.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from riskbandit import _kernels_py
from riskbandit.kernels import BACKEND

try:
    from riskbandit import _speedups
except ImportError:
    _speedups = None


def make_inputs(pool: int, slots: int, rounds: int, seed: int):
    rng = np.random.default_rng(seed)
    recoms = rng.integers(0, 30, size=(rounds, pool)).astype(np.float64)
    clicks = np.floor(recoms * rng.random((rounds, pool))).astype(np.float64)
    qs = rng.random((rounds, slots))
    us = rng.random((rounds, slots))
    log_t = np.log(np.arange(1, rounds + 1) + 1.0)
    return clicks, recoms, log_t, qs, us


def drive(impl, clicks, recoms, log_t, qs, us, slots: int) -> np.ndarray:
    rounds = clicks.shape[0]
    out = np.zeros(slots, dtype=np.int64)
    collected = np.zeros((rounds, slots), dtype=np.int64)
    for i in range(rounds):
        impl.select_slate(clicks[i], recoms[i], float(log_t[i]), True, 0.3,
                          qs[i], us[i], out)
        collected[i] = out
    return collected


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pool", type=int, default=25)
    parser.add_argument("--slots", type=int, default=10)
    parser.add_argument("--rounds", type=int, default=20000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    inputs = make_inputs(args.pool, args.slots, args.rounds, args.seed)

    if _speedups is None:
        print("compiled backend not importable; timing only the numpy fallback")
        impls = [("python", _kernels_py)]
    else:
        a = drive(_speedups, *inputs, args.slots)
        b = drive(_kernels_py, *inputs, args.slots)
        if not np.array_equal(a, b):
            raise SystemExit("backend outputs disagree; refusing to time")
        print(f"outputs identical over {args.rounds} rounds "
              f"(pool={args.pool}, slots={args.slots})")
        impls = [("compiled", _speedups), ("python", _kernels_py)]

    print(f"active backend in this environment: {BACKEND}")
    timings = {}
    for name, impl in impls:
        drive(impl, *inputs, args.slots)  # warm up
        start = time.perf_counter()
        drive(impl, *inputs, args.slots)
        elapsed = time.perf_counter() - start
        timings[name] = elapsed
        per_call = elapsed / args.rounds * 1e6
        print(f"{name:>9}: {elapsed:.3f}s total, {per_call:.1f}us per slate")

    if len(timings) == 2:
        print(f"speedup: {timings['python'] / timings['compiled']:.1f}x")


if __name__ == "__main__":
    main()
