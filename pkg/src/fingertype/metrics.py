"""Word and character error rates.

Error rates come from a minimum-edit-distance alignment with unit
costs.  The alignment is deterministic: ties are resolved while
backtracking from the end of the distance matrix, preferring
substitution, then deletion, then insertion, so the reported
(substitutions, deletions, insertions) triple is reproducible.  The
word rate tokenizes on whitespace; the character rate aligns the raw
character sequences, spaces included.

Aggregate rates are micro-averaged (total errors over total reference
length).  Per-sentence rates are also reported as mean and population
standard deviation.  A sentence with an empty reference and a
nonempty hypothesis has no defined rate; it is flagged and excluded
from the per-sentence mean, while its errors still count toward the
micro average's numerator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import ValidationError


@dataclass(frozen=True)
class EditCounts:
    substitutions: int
    deletions: int
    insertions: int
    ref_length: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def rate(self) -> float | None:
        """Errors per reference token; None when undefined (N = 0
        with errors)."""
        if self.ref_length == 0:
            return 0.0 if self.errors == 0 else None
        return self.errors / self.ref_length


def align(ref_tokens: Sequence, hyp_tokens: Sequence) -> EditCounts:
    """Deterministic minimum-edit alignment counts for one pair."""
    ids: dict = {}
    ref_ids = np.fromiter(
        (ids.setdefault(t, len(ids)) for t in ref_tokens), dtype=np.int32,
        count=len(ref_tokens),
    )
    hyp_ids = np.fromiter(
        (ids.setdefault(t, len(ids)) for t in hyp_tokens), dtype=np.int32,
        count=len(hyp_tokens),
    )
    s, d, i = _kernels.edit_ops(ref_ids, hyp_ids)
    return EditCounts(substitutions=s, deletions=d, insertions=i,
                      ref_length=len(ref_tokens))


@dataclass(frozen=True)
class SentenceEval:
    index: int
    word: EditCounts
    char: EditCounts
    flagged: bool


@dataclass(frozen=True)
class Aggregate:
    """Micro-averaged counts plus per-sentence rate statistics."""

    substitutions: int
    deletions: int
    insertions: int
    ref_length: int
    rate: float | None
    sentence_mean: float | None
    sentence_std: float | None
    flagged: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


@dataclass(frozen=True)
class EvalReport:
    sentences: tuple[SentenceEval, ...]
    word: Aggregate
    char: Aggregate

    def to_dict(self) -> dict:
        def agg(a: Aggregate) -> dict:
            return {
                "substitutions": a.substitutions,
                "deletions": a.deletions,
                "insertions": a.insertions,
                "ref_length": a.ref_length,
                "rate": a.rate,
                "sentence_mean": a.sentence_mean,
                "sentence_std": a.sentence_std,
                "flagged": a.flagged,
            }

        return {
            "n_sentences": len(self.sentences),
            "word": agg(self.word),
            "char": agg(self.char),
            "per_sentence": [
                {
                    "index": s.index,
                    "word": [s.word.substitutions, s.word.deletions,
                             s.word.insertions, s.word.ref_length],
                    "char": [s.char.substitutions, s.char.deletions,
                             s.char.insertions, s.char.ref_length],
                    "flagged": s.flagged,
                }
                for s in self.sentences
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def format_table(self) -> str:
        def pct(x: float | None) -> str:
            return "undefined" if x is None else f"{100.0 * x:.2f}%"

        lines = [
            f"sentences: {len(self.sentences)}",
            f"word error rate: {pct(self.word.rate)} "
            f"(S={self.word.substitutions} D={self.word.deletions} "
            f"I={self.word.insertions} N={self.word.ref_length})",
            f"char error rate: {pct(self.char.rate)} "
            f"(S={self.char.substitutions} D={self.char.deletions} "
            f"I={self.char.insertions} N={self.char.ref_length})",
        ]
        if self.word.sentence_mean is not None and self.word.sentence_std is not None:
            lines.append(
                f"per-sentence word rate: {pct(self.word.sentence_mean)} "
                f"+/- {100.0 * self.word.sentence_std:.2f}"
            )
        if self.char.sentence_mean is not None and self.char.sentence_std is not None:
            lines.append(
                f"per-sentence char rate: {pct(self.char.sentence_mean)} "
                f"+/- {100.0 * self.char.sentence_std:.2f}"
            )
        flagged = self.word.flagged
        if flagged:
            lines.append(f"flagged sentences (undefined rate): {flagged}")
        return "\n".join(lines) + "\n"


def _aggregate(counts: list[EditCounts]) -> Aggregate:
    total_s = sum(c.substitutions for c in counts)
    total_d = sum(c.deletions for c in counts)
    total_i = sum(c.insertions for c in counts)
    total_n = sum(c.ref_length for c in counts)
    total_err = total_s + total_d + total_i
    if total_n > 0:
        rate = total_err / total_n
    elif total_err == 0:
        rate = 0.0
    else:
        rate = None
    per = [c.rate() for c in counts]
    defined = [r for r in per if r is not None]
    flagged = sum(1 for r in per if r is None)
    if defined:
        mean = sum(defined) / len(defined)
        var = sum((r - mean) ** 2 for r in defined) / len(defined)
        std = math.sqrt(var)
    else:
        mean = None
        std = None
    return Aggregate(substitutions=total_s, deletions=total_d, insertions=total_i,
                     ref_length=total_n, rate=rate, sentence_mean=mean,
                     sentence_std=std, flagged=flagged)


def evaluate(refs: Sequence[str], hyps: Sequence[str]) -> EvalReport:
    """Score hypothesis sentences against references.

    The two lists must have equal, nonzero length; sentences pair by
    index.
    """
    if len(refs) != len(hyps):
        raise ValidationError(
            f"got {len(refs)} references but {len(hyps)} hypotheses"
        )
    if not refs:
        raise ValidationError("cannot evaluate an empty reference set")
    sentences: list[SentenceEval] = []
    word_counts: list[EditCounts] = []
    char_counts: list[EditCounts] = []
    for i, (ref, hyp) in enumerate(zip(refs, hyps)):
        w = align(ref.split(), hyp.split())
        c = align(list(ref), list(hyp))
        flagged = w.rate() is None or c.rate() is None
        sentences.append(SentenceEval(index=i, word=w, char=c, flagged=flagged))
        word_counts.append(w)
        char_counts.append(c)
    return EvalReport(
        sentences=tuple(sentences),
        word=_aggregate(word_counts),
        char=_aggregate(char_counts),
    )
