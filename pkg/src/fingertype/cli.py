"""Command-line interface.

One subcommand per pipeline stage plus ``e2e`` for the whole loop:

* ``keymap``: print or export the letter-finger map or a pool table
* ``encode``: text to finger events (JSON Lines)
* ``corrupt``: pass events through the confusion channel
* ``pools``: candidate pools for event files
* ``lm train`` / ``lm score``: fit and query backoff models
* ``decode``: beam-search pool files back into text
* ``eval``: word and character error rates
* ``signals synth`` / ``signals analyze``: recordings and statistics
* ``e2e``: text -> corrupt -> decode -> metrics report

Exit codes: 0 success, 1 usage or configuration, 2 file I/O,
3 invalid data, 4 scorer failure.  Flags override config-file values.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from ._jsonl import dump_records, group_pools, parse_records, pool_record
from .channel import default_confusion, perturb
from .config import PipelineConfig, apply_overrides, load_config
from .decoder import (
    BeamConfig,
    ExternalScorer,
    NGramScorer,
    decode_document,
    resolve_empty_pools,
)
from .errors import (
    ConfigError,
    DecodeError,
    ParseError,
    PipelineError,
    ScorerError,
    ValidationError,
)
from .keymap import (
    canonical_keymap,
    fingers_for_text,
    format_keymap,
    format_pool_table,
    normalize_text,
)
from .lexicon import CandidateConfig, candidate_words, load_lexicon
from .metrics import evaluate
from .ngram import load_table, save_table, train
from .pipeline import (
    build_smoothing,
    load_text_lines,
    report_to_json,
    run_e2e,
    sentence_pools,
    train_lm,
)
from .signals import (
    extract_segments,
    finger_stats,
    format_stats,
    load_recording,
    save_recording,
    save_segments,
    calibrated_config,
    synthesize,
    uniform_schedule,
    SynthConfig,
)


def _write_out(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_in(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _config_from_args(args) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {
        name: getattr(args, name)
        for name in (
            "pool_mode", "accuracy", "space_error_rate", "variation_p",
            "fallback_k", "order", "smoothing", "alpha", "add_k",
            "beam_width", "n_best", "prior_weight", "empty_pool",
            "scorer_cmd", "workers", "seed", "wordlist", "freq_corpus",
            "lm_corpus",
        )
        if hasattr(args, name)
    }
    return apply_overrides(cfg, overrides)


def cmd_keymap(args) -> int:
    if args.pools:
        _write_out(args, format_pool_table(args.pools))
    else:
        _write_out(args, format_keymap(canonical_keymap(space_finger=args.space_finger)))
    return 0


def cmd_encode(args) -> int:
    if args.text is not None:
        lines = [args.text]
    else:
        lines = _read_in(args.infile).splitlines()
    records = []
    index = 0
    for line in lines:
        ref = normalize_text(line)
        if not ref:
            continue
        records.append({"sentence": index, "ref": ref,
                        "events": fingers_for_text(ref)})
        index += 1
    if not records:
        raise ValidationError("no nonempty sentences to encode")
    _write_out(args, dump_records(records))
    return 0


def cmd_corrupt(args) -> int:
    model = default_confusion(args.accuracy, args.space_error_rate)
    records = []
    for lineno, record in parse_records(_read_in(args.infile)):
        try:
            index = int(record["sentence"])
            events = [int(e) for e in record["events"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad event record: {exc}", line=lineno) from None
        record = dict(record)
        record["events"] = perturb(events, model, args.seed, index)
        records.append(record)
    _write_out(args, dump_records(records))
    return 0


def cmd_pools(args) -> int:
    cfg = _config_from_args(args)
    lexicon = load_lexicon(cfg.wordlist, cfg.freq_corpus, max_word_len=cfg.max_word_len)
    records = []
    for lineno, record in parse_records(_read_in(args.infile)):
        try:
            index = int(record["sentence"])
            events = [int(e) for e in record["events"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad event record: {exc}", line=lineno) from None
        for pool in sentence_pools(events, lexicon, cfg):
            records.append(pool_record(index, pool))
    _write_out(args, dump_records(records))
    return 0


def cmd_lm_train(args) -> int:
    cfg = _config_from_args(args)
    model = train_lm(cfg)
    save_table(model, args.out)
    return 0


def cmd_lm_score(args) -> int:
    if args.model:
        model = load_table(args.model)
    else:
        model = train_lm(_config_from_args(args))
    text = normalize_text(args.text)
    score = model.sentence_logprob(text, include_eos=not args.no_eos)
    sys.stdout.write(f"{score!r}\n")
    return 0


def cmd_decode(args) -> int:
    cfg = _config_from_args(args)
    grouped = group_pools(_read_in(args.infile))
    if not grouped:
        raise ValidationError("pool file contains no sentences")
    sentences = [resolve_empty_pools(pools, cfg.empty_pool)
                 for pools in grouped.values()]
    beam = BeamConfig(beam_width=cfg.beam_width, n_best=cfg.n_best,
                      prior_weight=cfg.prior_weight)
    if cfg.scorer_cmd:
        with ExternalScorer(cfg.scorer_cmd) as scorer:
            results = decode_document(sentences, scorer, beam, workers=cfg.workers)
    else:
        model = load_table(args.lm) if args.lm else train_lm(cfg)
        results = decode_document(sentences, NGramScorer(model), beam,
                                  workers=cfg.workers)
    records = [
        {"sentence": index, "text": r.text, "score": r.score,
         "nbest": [[t, s] for t, s in r.nbest]}
        for index, r in zip(grouped, results)
    ]
    _write_out(args, dump_records(records))
    return 0


def cmd_eval(args) -> int:
    refs = [normalize_text(l) for l in _read_in(args.refs).splitlines()]
    refs = [r for r in refs if r]
    if args.hyps_format == "jsonl":
        hyps = []
        for lineno, record in parse_records(_read_in(args.hyps)):
            try:
                hyps.append(str(record["text"]))
            except KeyError:
                raise ParseError("decode record missing 'text'", line=lineno) from None
    else:
        hyps = [normalize_text(l) for l in _read_in(args.hyps).splitlines()]
        hyps = [h for h in hyps if h]
    report = evaluate(refs, hyps)
    _write_out(args, report.to_json() if args.json else report.format_table())
    return 0


def cmd_signals_synth(args) -> int:
    base = SynthConfig(sample_rate=args.rate, channels=args.channels,
                       noise_floor_uv=args.noise_floor)
    if args.raw:
        config = base
    else:
        config = calibrated_config(target_mean_rms_uv=args.target_rms,
                                   target_cv=args.target_cv, base=base)
    keys = (args.keys * ((args.count + len(args.keys) - 1) // len(args.keys)))[:args.count]
    schedule = uniform_schedule(keys, spacing_s=args.spacing)
    recording = synthesize(schedule, config, seed=args.seed)
    save_recording(recording, args.out)
    return 0


def cmd_signals_analyze(args) -> int:
    recording = load_recording(args.rec)
    segments = extract_segments(recording, pre=args.pre, post=args.post)
    stats = finger_stats(segments)
    if args.json:
        import json as _json

        doc = {
            str(f): {
                "count": s.count, "median_rms": s.median_rms,
                "mean_rms": s.mean_rms, "std_rms": s.std_rms,
                "cv": s.cv, "snr": s.snr, "degenerate": s.degenerate,
            }
            for f, s in stats.items()
        }
        _write_out(args, _json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        _write_out(args, format_stats(stats))
    return 0


def cmd_signals_segments(args) -> int:
    recording = load_recording(args.rec)
    segments = extract_segments(recording, pre=args.pre, post=args.post)
    save_segments(segments, args.out, sample_rate=recording.sample_rate)
    return 0


def cmd_e2e(args) -> int:
    cfg = _config_from_args(args)
    report = run_e2e(cfg, text_path=args.text)
    _write_out(args, report_to_json(report))
    if args.quiet:
        return 0
    metrics = report["metrics"]
    sys.stderr.write(
        f"sentences={metrics['n_sentences']} "
        f"wer={metrics['word']['rate']} cer={metrics['char']['rate']}\n"
    )
    return 0


def _add_config_flags(p: argparse.ArgumentParser, *names: str) -> None:
    p.add_argument("--config", help="INI config file; flags override it")
    flags = {
        "pool_mode": (("--pool-mode",), {"choices": ["canonical", "augmented"]}),
        "accuracy": (("--accuracy",), {"type": float}),
        "space_error_rate": (("--space-error-rate",), {"type": float}),
        "variation_p": (("--variation-p",), {"type": float}),
        "fallback_k": (("--fallback-k",), {"type": int}),
        "order": (("--order",), {"type": int}),
        "smoothing": (("--smoothing",), {"choices": ["stupid_backoff", "add_k"]}),
        "alpha": (("--alpha",), {"type": float}),
        "add_k": (("--add-k",), {"type": float}),
        "beam_width": (("--beam-width", "--beam"), {"type": int}),
        "n_best": (("--n-best",), {"type": int}),
        "prior_weight": (("--prior-weight",), {"type": float}),
        "empty_pool": (("--empty-pool",), {"choices": ["placeholder", "fallback", "error"]}),
        "scorer_cmd": (("--scorer-cmd",), {}),
        "workers": (("--workers",), {"type": int}),
        "seed": (("--seed",), {"type": int}),
        "wordlist": (("--wordlist",), {}),
        "freq_corpus": (("--freq-corpus",), {}),
        "lm_corpus": (("--lm-corpus",), {}),
    }
    for name in names:
        args_, kwargs = flags[name]
        p.add_argument(*args_, dest=name, default=None, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fingertype",
        description="Decode finger-event typing back into text.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keymap", help="print the keymap or a pool table")
    p.add_argument("--pools", choices=["canonical", "augmented"], default=None)
    p.add_argument("--space-finger", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_keymap)

    p = sub.add_parser("encode", help="text to finger events")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--text", help="a single sentence")
    g.add_argument("--in", dest="infile", help="text file, one sentence per line")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", help="pass events through the channel")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--accuracy", type=float, default=1.0)
    p.add_argument("--space-error-rate", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("pools", help="candidate pools for event files")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    _add_config_flags(p, "pool_mode", "fallback_k", "wordlist", "freq_corpus")
    p.set_defaults(func=cmd_pools)

    p = sub.add_parser("lm", help="language model tools")
    lm_sub = p.add_subparsers(dest="lm_command", required=True)
    q = lm_sub.add_parser("train", help="fit a model and write its table")
    q.add_argument("--out", required=True)
    _add_config_flags(q, "lm_corpus", "order", "smoothing", "alpha", "add_k")
    q.set_defaults(func=cmd_lm_train)
    q = lm_sub.add_parser("score", help="log probability of a sentence")
    q.add_argument("--model", help="model table file; omit to train on the corpus")
    q.add_argument("--text", required=True)
    q.add_argument("--no-eos", action="store_true")
    _add_config_flags(q, "lm_corpus", "order", "smoothing", "alpha", "add_k")
    q.set_defaults(func=cmd_lm_score)

    p = sub.add_parser("decode", help="beam-search pool files into text")
    p.add_argument("--in", dest="infile", required=True, help="pool JSONL")
    p.add_argument("--lm", help="model table file; omit to train on the corpus")
    p.add_argument("--out")
    _add_config_flags(p, "beam_width", "n_best", "prior_weight", "empty_pool",
                      "scorer_cmd", "workers", "order", "smoothing", "alpha",
                      "add_k", "lm_corpus")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="word and character error rates")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps", required=True)
    p.add_argument("--hyps-format", choices=["text", "jsonl"], default="text")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("signals", help="synthetic recordings and statistics")
    sig_sub = p.add_subparsers(dest="signals_command", required=True)
    q = sig_sub.add_parser("synth", help="generate a recording")
    q.add_argument("--keys", default="aserhilp",
                   help="letters to cycle through (defaults cover all fingers)")
    q.add_argument("--count", type=int, default=64)
    q.add_argument("--spacing", type=float, default=2.0)
    q.add_argument("--rate", type=float, default=2000.0)
    q.add_argument("--channels", type=int, default=32)
    q.add_argument("--noise-floor", type=float, default=1.0)
    q.add_argument("--target-rms", type=float, default=10.8)
    q.add_argument("--target-cv", type=float, default=0.44)
    q.add_argument("--raw", action="store_true",
                   help="skip calibration; use raw burst specs")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, help="output directory")
    q.set_defaults(func=cmd_signals_synth)
    q = sig_sub.add_parser("analyze", help="per-finger statistics")
    q.add_argument("--rec", required=True, help="recording directory")
    q.add_argument("--pre", type=float, default=1.0)
    q.add_argument("--post", type=float, default=1.0)
    q.add_argument("--json", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_signals_analyze)
    q = sig_sub.add_parser("segments", help="extract and save segments")
    q.add_argument("--rec", required=True)
    q.add_argument("--pre", type=float, default=1.0)
    q.add_argument("--post", type=float, default=1.0)
    q.add_argument("--out", required=True, help="output directory")
    q.set_defaults(func=cmd_signals_segments)

    p = sub.add_parser("e2e", help="full pipeline with a metrics report")
    p.add_argument("--text", help="reference sentences; omit for the bundled demo")
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    _add_config_flags(p, "pool_mode", "accuracy", "space_error_rate",
                      "variation_p", "fallback_k", "order", "smoothing",
                      "alpha", "add_k", "beam_width", "n_best", "prior_weight",
                      "empty_pool", "scorer_cmd", "workers", "seed",
                      "wordlist", "freq_corpus", "lm_corpus")
    p.set_defaults(func=cmd_e2e)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (ScorerError, DecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except (ParseError, ValidationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except PipelineError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
