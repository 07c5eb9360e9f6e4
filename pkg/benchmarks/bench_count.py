#!/usr/bin/env python3
"""Benchmark the compiled counting kernel against the pure-Python fallback.

Generates filing-like text (marker density roughly matching annual reports)
and times both backends over the same corpus.

    python benchmarks/bench_count.py [--mb 8] [--seed 0]
"""

import argparse
import random
import time

from promises._countpure import count_markers as pure_count

try:
    from promises._countcore import count_markers as core_count
except ImportError:
    core_count = None

WORDS = (
    "the company expects revenue growth in segment operations and "
    "management believes that results will improve while costs shall "
    "decline because customers are going to renew contracts".split()
)


def make_text(target_bytes: int, seed: int) -> str:
    rng = random.Random(seed)
    parts = []
    size = 0
    while size < target_bytes:
        n = rng.randint(6, 24)
        sentence = " ".join(rng.choice(WORDS) for _ in range(n)).capitalize() + ". "
        parts.append(sentence)
        size += len(sentence)
    return "".join(parts)


def bench(fn, text: str, repeats: int = 3) -> tuple[float, tuple]:
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(text)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mb", type=float, default=8.0, help="corpus size in MB")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    text = make_text(int(args.mb * 1e6), args.seed)
    mb = len(text) / 1e6
    print(f"corpus: {mb:.1f} MB, seed {args.seed}")

    t_pure, r_pure = bench(pure_count, text)
    print(f"pure python : {t_pure:8.3f} s   {mb / t_pure:7.1f} MB/s   counts={r_pure}")

    if core_count is None:
        print("compiled    : not built (python setup.py build_ext --inplace)")
        return 0

    t_core, r_core = bench(core_count, text)
    print(f"compiled    : {t_core:8.3f} s   {mb / t_core:7.1f} MB/s   counts={r_core}")
    if r_core != r_pure:
        print("MISMATCH between backends!")
        return 1
    print(f"speedup     : {t_pure / t_core:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
