"""Finger-sequence text decoding pipeline.

Typing with one finger per key group turns text into a sequence of
finger events; this package decodes such sequences back into text.
It covers the full loop: the finger-to-letter keymap, a lexicon with
pool-constrained candidate search, a calibrated stochastic corruption
channel, backoff n-gram language models, beam-search decoding with
pluggable scorers, word and character error rates, and synthesis and
analysis of keystroke-aligned multichannel signals.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .channel import (
    ConfusionModel,
    VariationModel,
    apply_variation,
    default_confusion,
    default_variation,
    perturb,
)
from .decoder import (
    BeamConfig,
    DecodeResult,
    ExternalScorer,
    NGramScorer,
    decode,
    decode_document,
    resolve_empty_pools,
    serialize_prompt,
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
    ACTIVE_FINGERS,
    AUGMENTED_POOLS,
    CANONICAL_POOLS,
    THUMBS,
    KeyMap,
    LetterPool,
    canonical_keymap,
    fingers_for_text,
    letter_pool,
    normalize_text,
    split_words,
)
from .lexicon import (
    Candidate,
    CandidateConfig,
    CandidatePool,
    EmptyPool,
    Lexicon,
    candidate_words,
    fallback_candidates,
    load_lexicon,
)
from .metrics import EditCounts, EvalReport, align, evaluate
from .ngram import AddK, ArpaModel, NGramModel, StupidBackoff, parse_table, train
from .signals import (
    BurstSpec,
    FingerStat,
    Keystroke,
    Recording,
    Segment,
    SynthConfig,
    calibrated_config,
    extract_segments,
    finger_stats,
    rms,
    synthesize,
)

__all__ = [
    "__version__",
    "KERNEL_BACKEND",
    "ACTIVE_FINGERS",
    "AUGMENTED_POOLS",
    "CANONICAL_POOLS",
    "THUMBS",
    "AddK",
    "ArpaModel",
    "BeamConfig",
    "BurstSpec",
    "Candidate",
    "CandidateConfig",
    "CandidatePool",
    "ConfigError",
    "ConfusionModel",
    "DecodeError",
    "DecodeResult",
    "EditCounts",
    "EmptyPool",
    "EvalReport",
    "ExternalScorer",
    "FingerStat",
    "KeyMap",
    "Keystroke",
    "LetterPool",
    "Lexicon",
    "NGramModel",
    "NGramScorer",
    "ParseError",
    "PipelineError",
    "Recording",
    "ScorerError",
    "Segment",
    "StupidBackoff",
    "SynthConfig",
    "ValidationError",
    "VariationModel",
    "align",
    "apply_variation",
    "calibrated_config",
    "candidate_words",
    "canonical_keymap",
    "decode",
    "decode_document",
    "default_confusion",
    "default_variation",
    "evaluate",
    "extract_segments",
    "fallback_candidates",
    "finger_stats",
    "fingers_for_text",
    "letter_pool",
    "load_lexicon",
    "normalize_text",
    "parse_table",
    "perturb",
    "resolve_empty_pools",
    "rms",
    "serialize_prompt",
    "split_words",
    "synthesize",
    "train",
]
