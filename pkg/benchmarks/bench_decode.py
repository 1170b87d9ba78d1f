"""Measure end-to-end decode throughput in sentences per second.

Builds candidate pools for a sample of bundled corpus sentences, then
times beam-search decoding with the bundled trigram model. Run as:

    python benchmarks/bench_decode.py [--sentences N] [--beam W]
"""

from __future__ import annotations

import argparse
import random
import time

from importlib import resources

from fingertype.config import PipelineConfig
from fingertype.decoder import BeamConfig, NGramScorer, decode
from fingertype.keymap import fingers_for_text, normalize_text
from fingertype.lexicon import load_lexicon
from fingertype.pipeline import sentence_pools, train_lm


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sentences", type=int, default=500)
    parser.add_argument("--beam", type=int, default=8)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    text = resources.files("fingertype").joinpath(
        "data", "corpus.txt").read_text(encoding="utf-8")
    lines = [normalize_text(l) for l in text.splitlines() if l.strip()]
    rng = random.Random(args.seed)
    refs = [rng.choice(lines) for _ in range(args.sentences)]

    cfg = PipelineConfig(fallback_k=3)
    lexicon = load_lexicon()
    scorer = NGramScorer(train_lm(cfg))
    docs = [sentence_pools(fingers_for_text(ref), lexicon, cfg)
            for ref in refs]

    beam = BeamConfig(beam_width=args.beam)
    start = time.perf_counter()
    for pools in docs:
        decode(pools, scorer, beam)
    elapsed = time.perf_counter() - start

    pool_sizes = [len(p.candidates) for pools in docs for p in pools]
    print(f"decoded {len(docs)} sentences in {elapsed:.2f}s "
          f"({len(docs) / elapsed:.0f} sentences/s)")
    print(f"beam width {args.beam}, mean pool size "
          f"{sum(pool_sizes) / len(pool_sizes):.2f}, "
          f"max pool size {max(pool_sizes)}")


if __name__ == "__main__":
    main()
