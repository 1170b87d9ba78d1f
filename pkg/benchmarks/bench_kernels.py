"""Compare the compiled kernels against the pure-Python fallback.

Times the two hot primitives (edit-distance alignment and trie pool
search) over identical workloads and prints a small table. Run as:

    python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from fingertype._kernels import _pykernels
from fingertype.keymap import ACTIVE_FINGERS, AUGMENTED_POOLS, CANONICAL_POOLS
from fingertype.lexicon import load_lexicon

try:
    from fingertype._kernels import _ckernels
except ImportError:
    _ckernels = None


def time_call(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_edit_ops(repeats: int) -> list[tuple[str, float]]:
    # like metrics.align, feed the kernels integer token ids
    rng = random.Random(7)
    pairs = []
    for _ in range(2000):
        ref = [rng.randrange(26) for _ in range(rng.randint(3, 40))]
        hyp = [rng.randrange(26) for _ in range(rng.randint(3, 40))]
        pairs.append((ref, hyp))

    def run(module):
        def _inner():
            for ref, hyp in pairs:
                module.edit_ops(ref, hyp)
        return _inner

    rows = [("edit_ops/python", time_call(run(_pykernels), repeats))]
    if _ckernels is not None:
        rows.append(("edit_ops/cython", time_call(run(_ckernels), repeats)))
    return rows


def bench_trie_search(repeats: int) -> list[tuple[str, float]]:
    lexicon = load_lexicon()
    rng = random.Random(11)
    masks = []
    for _ in range(3000):
        length = rng.randint(2, 9)
        mask = np.zeros((length, 26), dtype=np.uint8)
        for i in range(length):
            table = CANONICAL_POOLS if rng.random() < 0.8 else AUGMENTED_POOLS
            for ch in table[rng.choice(ACTIVE_FINGERS)]:
                mask[i, ord(ch) - 97] = 1
        masks.append(mask)

    def run(module):
        handle = module.prepare_trie(*lexicon._trie)

        def _inner():
            for mask in masks:
                module.trie_search(handle, mask)
        return _inner

    rows = [("trie_search/python", time_call(run(_pykernels), repeats))]
    if _ckernels is not None:
        rows.append(("trie_search/cython", time_call(run(_ckernels), repeats)))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best-of is reported")
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled kernels unavailable; timing pure Python only")

    rows = bench_edit_ops(args.repeats) + bench_trie_search(args.repeats)
    width = max(len(name) for name, _ in rows)
    print(f"{'kernel':<{width}}  best time")
    for name, secs in rows:
        print(f"{name:<{width}}  {secs * 1000:8.2f} ms")

    for prim in ("edit_ops", "trie_search"):
        timed = {name.split("/")[1]: secs for name, secs in rows
                 if name.startswith(prim)}
        if "cython" in timed:
            print(f"{prim}: compiled is {timed['python'] / timed['cython']:.1f}x "
                  f"the pure-Python speed")


if __name__ == "__main__":
    main()
