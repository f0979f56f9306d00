#!/usr/bin/env python3
"""Benchmark the two sliding-correlation backends and the cycle model.

Usage: python benchmarks/bench_scan.py [--bits N] [--n SYNC_BITS]
"""

import argparse
import time

import numpy as np

from framesync import HAVE_NUMBA, CorrelationScanner, make_params, SyncMachine, gen_sync_word


def time_best(fn, reps=3):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bits", type=int, default=20_000_000, help="stream length")
    ap.add_argument("--n", type=int, default=540, help="sync word length")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    stream = rng.integers(0, 2, args.bits, dtype=np.uint8)
    sync = gen_sync_word(args.n, 0)

    print(f"stream: {args.bits / 1e6:.1f} Mbit, sync word: {args.n} bits")
    results = {}
    backends = (["numba"] if HAVE_NUMBA else []) + ["numpy"]
    for backend in backends:
        scanner = CorrelationScanner(sync, backend=backend)
        scanner.scan(stream[: args.n + 64])  # warm up (JIT compile / FFT plan)
        dt = time_best(lambda: scanner.scan(stream))
        results[backend] = dt
        print(f"  scan [{backend:5s}]: {dt:8.3f} s   {args.bits / dt / 1e6:8.1f} Mbit/s")
    if len(results) == 2:
        print(f"  speedup numba/numpy: {results['numpy'] / results['numba']:.1f}x")

    # cycle-accurate model throughput (independent of scan backend)
    q = 60 if args.n % 60 == 0 else args.n
    params = make_params(args.n, q, 10, round(0.65 * args.n))
    machine = SyncMachine(params, sync)
    cycles = 2000
    blocks = rng.integers(0, 2, (cycles, q), dtype=np.uint8)
    t0 = time.perf_counter()
    for b in blocks:
        machine.step(b)
    dt = time.perf_counter() - t0
    print(
        f"  cycle model (n={args.n}, q={q}): {cycles / dt:,.0f} cycles/s "
        f"= {cycles * q / dt / 1e6:.2f} Mbit/s"
    )


if __name__ == "__main__":
    main()
