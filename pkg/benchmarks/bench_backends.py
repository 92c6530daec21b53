#!/usr/bin/env python3
"""Benchmark the state-space scan kernels: numba loops vs vectorized numpy.

Builds seeded random games with a configurable state-space size, sweeps the
full space through both kernels (bottleneck reduction and the weak-Nash
deviation check), and reports median wall times and the speedup.

Usage:
    python benchmarks/bench_backends.py [--players 14] [--strategies 2]
                                        [--resources 24] [--repeats 5]
"""

import argparse
import statistics
import time

import numpy as np

from polybottleneck import kernels
from polybottleneck.game_core import Game


def build_game(players: int, strategies: int, resources: int, seed: int) -> Game:
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(players):
        strat_set = []
        for _ in range(strategies):
            size = int(rng.integers(1, min(3, resources) + 1))
            strat_set.append(sorted(int(r) for r in rng.choice(resources, size, replace=False)))
        specs.append(strat_set)
    return Game.build(resources, 2, specs)


def sweep(enc, fn, backend: str) -> float:
    start = time.perf_counter()
    for lo in range(0, enc.num_states, kernels.CHUNK):
        hi = min(lo + kernels.CHUNK, enc.num_states)
        fn(enc, lo, hi, backend)
    return time.perf_counter() - start


def bench(enc, fn, backend: str, repeats: int) -> float:
    sweep(enc, fn, backend)  # warm-up (JIT compile / cache touch)
    return statistics.median(sweep(enc, fn, backend) for _ in range(repeats))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--players", type=int, default=14)
    parser.add_argument("--strategies", type=int, default=2)
    parser.add_argument("--resources", type=int, default=24)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    game = build_game(args.players, args.strategies, args.resources, args.seed)
    enc = kernels.encode_game(game)
    print(f"game: {args.players} players x {args.strategies} strategies, "
          f"{args.resources} resources, {enc.num_states} states")

    backends = ["numpy"]
    if kernels.numba_available():
        backends.insert(0, "numba")
    else:
        print("numba unavailable (POLYBOTTLENECK_BACKEND=numpy?); timing numpy only")

    rows = []
    for name, fn in [("bottleneck scan", kernels.bottlenecks_range),
                     ("nash-check scan", kernels.nash_mask_range)]:
        times = {b: bench(enc, fn, b, args.repeats) for b in backends}
        rows.append((name, times))

    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) +
          ("     speedup" if len(backends) == 2 else ""))
    for name, times in rows:
        cells = "".join(f"{times[b]*1e3:>10.1f}ms" for b in backends)
        extra = ""
        if len(backends) == 2:
            extra = f"{times['numpy'] / times['numba']:>11.1f}x"
        print(f"{name:<18}{cells}{extra}")


if __name__ == "__main__":
    main()
