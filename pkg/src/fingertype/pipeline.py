"""End-to-end run: text -> events -> pools -> decode -> evaluation.

The report this produces is a plain dict ready for JSON: the package
version, the full configuration with its hash, aggregate metrics, and
per-sentence results.  Everything downstream of the inputs is
deterministic, including across worker counts, because per-sentence
randomness is keyed by (seed, sentence index) and decoding ties break
lexicographically.
"""

from __future__ import annotations

import json

from . import __version__
from .channel import apply_variation, default_confusion, default_variation, perturb
from .config import PipelineConfig
from .decoder import (
    BeamConfig,
    ExternalScorer,
    NGramScorer,
    decode_document,
    resolve_empty_pools,
)
from .errors import ValidationError
from .keymap import canonical_keymap, fingers_for_text, normalize_text, split_words
from .lexicon import CandidateConfig, Lexicon, candidate_words, load_lexicon
from .ngram import AddK, NGramModel, StupidBackoff, train


def load_text_lines(path: str | None) -> list[str]:
    """Reference sentences, one per line; None loads the bundled demo."""
    if path is None:
        from importlib import resources

        text = resources.files("fingertype").joinpath(
            "data", "demo_sentences.txt").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    lines = [normalize_text(line) for line in text.splitlines()]
    return [line for line in lines if line]


def build_smoothing(cfg: PipelineConfig):
    if cfg.smoothing == "stupid_backoff":
        return StupidBackoff(alpha=cfg.alpha)
    return AddK(k=cfg.add_k)


def train_lm(cfg: PipelineConfig) -> NGramModel:
    if cfg.lm_corpus is None:
        from importlib import resources

        text = resources.files("fingertype").joinpath(
            "data", "corpus.txt").read_text(encoding="utf-8")
    else:
        with open(cfg.lm_corpus, encoding="utf-8") as fh:
            text = fh.read()
    return train(text.splitlines(), order=cfg.order, smoothing=build_smoothing(cfg))


def sentence_events(ref: str, cfg: PipelineConfig, index: int) -> list[int]:
    """Encode one normalized sentence and run the corruption steps."""
    keymap = canonical_keymap(space_finger=cfg.space_finger)
    if cfg.variation_p > 0.0:
        events = apply_variation(ref, default_variation(cfg.variation_p),
                                 cfg.seed, index, keymap=keymap)
    else:
        events = fingers_for_text(ref, keymap)
    if cfg.accuracy < 1.0 or cfg.space_error_rate > 0.0:
        model = default_confusion(cfg.accuracy, cfg.space_error_rate)
        events = perturb(events, model, cfg.seed, index)
    return events


def sentence_pools(events: list[int], lexicon: Lexicon, cfg: PipelineConfig):
    """Candidate pools for one sentence's (possibly corrupted) events."""
    word_seqs = split_words(events)
    if not word_seqs:
        raise ValidationError("sentence produced no word events")
    ccfg = CandidateConfig(max_word_len=cfg.max_word_len,
                           fallback_k=cfg.fallback_k,
                           fallback_penalty=cfg.fallback_penalty)
    return [
        candidate_words(seq, lexicon, mode=cfg.pool_mode, config=ccfg, position=j)
        for j, seq in enumerate(word_seqs)
    ]


def run_e2e(cfg: PipelineConfig, lines: list[str] | None = None,
            text_path: str | None = None) -> dict:
    """Run the whole pipeline and return the report dict."""
    from .metrics import evaluate

    if lines is not None and text_path is not None:
        raise ValidationError("pass either lines or text_path, not both")
    refs = lines if lines is not None else load_text_lines(text_path)
    refs = [normalize_text(r) for r in refs if normalize_text(r)]
    if not refs:
        raise ValidationError("no reference sentences to process")
    lexicon = load_lexicon(cfg.wordlist, cfg.freq_corpus,
                           max_word_len=cfg.max_word_len)
    model = train_lm(cfg)
    beam = BeamConfig(beam_width=cfg.beam_width, n_best=cfg.n_best,
                      prior_weight=cfg.prior_weight)
    doc_pools = []
    for i, ref in enumerate(refs):
        events = sentence_events(ref, cfg, i)
        pools = sentence_pools(events, lexicon, cfg)
        doc_pools.append(resolve_empty_pools(pools, cfg.empty_pool))
    if cfg.scorer_cmd:
        with ExternalScorer(cfg.scorer_cmd) as scorer:
            results = decode_document(doc_pools, scorer, beam, workers=cfg.workers)
    else:
        scorer = NGramScorer(model)
        results = decode_document(doc_pools, scorer, beam, workers=cfg.workers)
    hyps = [r.text for r in results]
    report = evaluate(refs, hyps)
    return {
        "version": __version__,
        "config": cfg.to_dict(),
        "config_hash": cfg.content_hash(),
        "metrics": report.to_dict(),
        "sentences": [
            {
                "index": i,
                "ref": refs[i],
                "hyp": results[i].text,
                "score": results[i].score,
                "nbest": [[t, s] for t, s in results[i].nbest],
            }
            for i in range(len(refs))
        ],
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
