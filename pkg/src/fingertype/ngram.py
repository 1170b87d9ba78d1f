"""Word-level backoff n-gram language models.

Models train from a tokenized corpus (one sentence per line) and score
words in context with natural-log probabilities.  Two smoothing
families are supported:

* stupid backoff: score = count(ctx, w) / count(ctx) when the full
  n-gram was seen, otherwise ``alpha`` times the score one order down.
  Scores are unnormalized (they do not sum to 1 over the vocabulary).
* add-k: a normalized conditional, (count + k) / (total + k * V), with
  V the size of the prediction vocabulary including the unknown token.
  With k = 0 this degenerates to maximum likelihood and unseen events
  score ``-inf``; every score is finite for k > 0.

Counting conventions: each sentence is padded with ``order - 1``
``<s>`` markers and one ``</s>``; n-grams ending in ``<s>`` are never
counted, so ``<s>`` has no unigram probability.  Unknown words map to
``<unk>``.  ``logprob`` truncates context to the ``order - 1`` most
recent words and scores shorter contexts at their own order without
padding; callers that want sentence-initial conditioning pass ``<s>``
markers themselves (see ``sentence_logprob`` and the decoder's
scorer).

Models serialize to a plain-text table compatible with the classic
backoff format: a ``\\data\\`` header with per-order entry counts,
one section per order listing ``log10 p``, the n-gram, and a log10
backoff weight for orders below the highest, and a closing
``\\end\\``.  Floats are written with ``repr`` so parsing a file and
writing it back is byte-identical.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, ParseError, ValidationError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class StupidBackoff:
    """Unnormalized backoff scoring with a constant discount."""

    alpha: float = 0.4

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("stupid backoff alpha must be in (0, 1]")


@dataclass(frozen=True)
class AddK:
    """Additive smoothing; normalized over the prediction vocabulary."""

    k: float = 0.1

    def __post_init__(self):
        if self.k < 0.0:
            raise ConfigError("add-k smoothing requires k >= 0")


Smoothing = StupidBackoff | AddK


def _tokenize(sentence) -> list[str]:
    if isinstance(sentence, str):
        return sentence.split()
    return list(sentence)


class NGramModel:
    """Counts-backed n-gram model; build with :func:`train`."""

    def __init__(self, order: int, smoothing: Smoothing,
                 counts: list[dict[tuple[str, ...], int]],
                 totals: list[dict[tuple[str, ...], int]],
                 vocab: frozenset[str]):
        self.order = order
        self.smoothing = smoothing
        self._counts = counts  # counts[L] holds (L+1)-grams
        self._totals = totals  # totals[L] holds context sums for (L+1)-grams
        self.vocab = vocab  # prediction set: corpus tokens + </s> + <unk>
        self._vsize = len(vocab)

    @property
    def token_count(self) -> int:
        """Corpus size N: word tokens plus one ``</s>`` per sentence."""
        return self._totals[0][()]

    def count(self, ngram: Sequence[str]) -> int:
        g = tuple(ngram)
        if not 1 <= len(g) <= self.order:
            raise ValidationError(f"n-gram length {len(g)} outside 1..{self.order}")
        return self._counts[len(g) - 1].get(g, 0)

    def _map_word(self, word: str) -> str:
        return word if word in self.vocab else UNK

    def _map_context(self, context: Sequence[str]) -> tuple[str, ...]:
        ctx = tuple(context)[max(0, len(context) - (self.order - 1)):] if self.order > 1 else ()
        return tuple(t if (t in self.vocab or t == BOS) else UNK for t in ctx)

    def logprob(self, word: str, context: Sequence[str] = ()) -> float:
        """Natural-log score of ``word`` after ``context``.

        Context is truncated to the ``order - 1`` most recent tokens;
        shorter contexts are scored at their own order.  Unknown words
        and context tokens map to ``<unk>``.
        """
        w = self._map_word(word)
        ctx = self._map_context(context)
        if isinstance(self.smoothing, StupidBackoff):
            return self._sb_score(ctx, w)
        return self._addk_score(ctx, w)

    def _sb_score(self, ctx: tuple[str, ...], w: str) -> float:
        alpha = self.smoothing.alpha
        discount = 0.0
        while True:
            level = len(ctx)
            c = self._counts[level].get(ctx + (w,), 0)
            if c > 0:
                total = self._totals[level][ctx]
                return discount + math.log(c) - math.log(total)
            if level == 0:
                # Only <unk> reaches here: every vocab word has a
                # unigram count.  Scored as a single unseen event.
                return discount - math.log(self.token_count)
            ctx = ctx[1:]
            discount += math.log(alpha)

    def _addk_score(self, ctx: tuple[str, ...], w: str) -> float:
        k = self.smoothing.k
        level = len(ctx)
        c = self._counts[level].get(ctx + (w,), 0)
        total = self._totals[level].get(ctx, 0)
        num = c + k
        den = total + k * self._vsize
        if num == 0.0 or den == 0.0:
            return -math.inf
        return math.log(num) - math.log(den)

    def sentence_logprob(self, sentence, include_eos: bool = True) -> float:
        """Sum of word scores with sentence-initial ``<s>`` padding."""
        tokens = _tokenize(sentence)
        history = [BOS] * (self.order - 1)
        total = 0.0
        for tok in tokens:
            total += self.logprob(tok, history)
            history.append(tok)
        if include_eos:
            total += self.logprob(EOS, history)
        return total

    def _entry_log10(self, ngram: tuple[str, ...]) -> float:
        """log10 conditional of a stored n-gram, for serialization."""
        ctx, w = ngram[:-1], ngram[-1]
        level = len(ctx)
        if ngram == (BOS,):
            return -99.0
        if ngram == (UNK,):
            if isinstance(self.smoothing, StupidBackoff):
                return -math.log10(self.token_count)
            k = self.smoothing.k
            if k == 0.0:
                return -99.0
            return math.log10(k / (self.token_count + k * self._vsize))
        c = self._counts[level][ngram]
        total = self._totals[level][ctx]
        if isinstance(self.smoothing, StupidBackoff):
            return math.log10(c / total)
        k = self.smoothing.k
        return math.log10((c + k) / (total + k * self._vsize))

    def _backoff_log10(self) -> float:
        if isinstance(self.smoothing, StupidBackoff):
            return math.log10(self.smoothing.alpha)
        return 0.0

    def to_text(self) -> str:
        """Serialize to the backoff table format (see module docstring)."""
        sections: list[list[tuple[tuple[str, ...], float, float | None]]] = []
        bow = self._backoff_log10()
        for level in range(self.order):
            grams = set(self._counts[level])
            if level == 0:
                grams.add((BOS,))
                grams.add((UNK,))
            entries = []
            for g in sorted(grams):
                logp = self._entry_log10(g)
                entries.append((g, logp, bow if level + 1 < self.order else None))
            sections.append(entries)
        return _format_table(self.order, sections)


def train(corpus: Iterable, order: int = 3,
          smoothing: Smoothing | None = None) -> NGramModel:
    """Count n-grams from a corpus of sentences.

    ``corpus`` yields sentences as strings (split on whitespace) or
    token sequences.  Empty sentences are skipped; an empty corpus is
    a configuration error.
    """
    if order < 1:
        raise ConfigError("order must be at least 1")
    if smoothing is None:
        smoothing = StupidBackoff()
    counts: list[dict[tuple[str, ...], int]] = [dict() for _ in range(order)]
    vocab: set[str] = set()
    n_sentences = 0
    for sentence in corpus:
        tokens = _tokenize(sentence)
        if not tokens:
            continue
        n_sentences += 1
        vocab.update(tokens)
        padded = [BOS] * (order - 1) + tokens + [EOS]
        for n in range(1, order + 1):
            level = counts[n - 1]
            for i in range(len(padded) - n + 1):
                gram = tuple(padded[i:i + n])
                if gram[-1] == BOS:
                    continue
                level[gram] = level.get(gram, 0) + 1
    if n_sentences == 0:
        raise ConfigError("training corpus has no nonempty sentences")
    totals: list[dict[tuple[str, ...], int]] = [dict() for _ in range(order)]
    for n in range(1, order + 1):
        agg = totals[n - 1]
        for gram, c in counts[n - 1].items():
            ctx = gram[:-1]
            agg[ctx] = agg.get(ctx, 0) + c
    vocab.add(EOS)
    vocab.add(UNK)
    return NGramModel(order=order, smoothing=smoothing, counts=counts,
                      totals=totals, vocab=frozenset(vocab))


def _format_table(order: int,
                  sections: list[list[tuple[tuple[str, ...], float, float | None]]]) -> str:
    lines = ["\\data\\"]
    for n in range(1, order + 1):
        lines.append(f"ngram {n}={len(sections[n - 1])}")
    for n in range(1, order + 1):
        lines.append("")
        lines.append(f"\\{n}-grams:")
        for gram, logp, bow in sections[n - 1]:
            body = f"{logp!r}\t{' '.join(gram)}"
            if bow is not None:
                body += f"\t{bow!r}"
            lines.append(body)
    lines.append("")
    lines.append("\\end\\")
    return "\n".join(lines) + "\n"


class ArpaModel:
    """A backoff model read from its text serialization.

    Lookup walks from the longest matching n-gram down, adding the
    backoff weight of each context it falls back through.  Words and
    context tokens missing from the unigram vocabulary map to
    ``<unk>``; a file without an ``<unk>`` entry scores such queries
    at the -99 floor.
    """

    _FLOOR10 = -99.0

    def __init__(self, order: int,
                 tables: list[dict[tuple[str, ...], tuple[float, float | None]]]):
        self.order = order
        self._tables = tables
        self.vocab = frozenset(g[0] for g in tables[0])

    def logprob(self, word: str, context: Sequence[str] = ()) -> float:
        w = word if (word,) in self._tables[0] else UNK
        ctx = tuple(context)[max(0, len(context) - (self.order - 1)):] if self.order > 1 else ()
        ctx = tuple(t if ((t,) in self._tables[0] or t == BOS) else UNK for t in ctx)
        return self._score(ctx, w) * _LN10

    def _score(self, ctx: tuple[str, ...], w: str) -> float:
        entry = self._tables[len(ctx)].get(ctx + (w,))
        if entry is not None:
            return entry[0]
        if ctx:
            parent = self._tables[len(ctx) - 1].get(ctx)
            bow = parent[1] if parent is not None and parent[1] is not None else 0.0
            return bow + self._score(ctx[1:], w)
        unk = self._tables[0].get((UNK,))
        return unk[0] if unk is not None else self._FLOOR10

    def sentence_logprob(self, sentence, include_eos: bool = True) -> float:
        tokens = _tokenize(sentence)
        history = [BOS] * (self.order - 1)
        total = 0.0
        for tok in tokens:
            total += self.logprob(tok, history)
            history.append(tok)
        if include_eos:
            total += self.logprob(EOS, history)
        return total

    def to_text(self) -> str:
        sections = []
        for level in range(self.order):
            entries = [
                (g, logp, bow)
                for g, (logp, bow) in sorted(self._tables[level].items())
            ]
            sections.append(entries)
        return _format_table(self.order, sections)


def parse_table(text: str) -> ArpaModel:
    """Parse the backoff table format into an :class:`ArpaModel`.

    Raises :class:`ParseError` with a line number on malformed input:
    missing headers, bad counts, short lines, or a missing ``\\end\\``.
    """
    lines = text.splitlines()
    i = 0
    n_lines = len(lines)
    while i < n_lines and not lines[i].strip():
        i += 1
    if i >= n_lines or lines[i].strip() != "\\data\\":
        raise ParseError("expected \\data\\ header", line=i + 1 if i < n_lines else None)
    i += 1
    declared: dict[int, int] = {}
    while i < n_lines:
        line = lines[i].strip()
        if not line:
            i += 1
            continue
        if line.startswith("\\"):
            break
        if not line.startswith("ngram "):
            raise ParseError(f"unexpected line in header: {line!r}", line=i + 1)
        try:
            n_s, count_s = line[len("ngram "):].split("=")
            declared[int(n_s)] = int(count_s)
        except ValueError:
            raise ParseError(f"bad ngram count line: {line!r}", line=i + 1) from None
        i += 1
    if not declared:
        raise ParseError("no ngram counts declared", line=i + 1 if i < n_lines else None)
    order = max(declared)
    if sorted(declared) != list(range(1, order + 1)):
        raise ParseError(f"ngram counts must cover 1..{order}")
    tables: list[dict[tuple[str, ...], tuple[float, float | None]]] = [
        dict() for _ in range(order)
    ]
    current: int | None = None
    ended = False
    while i < n_lines:
        raw = lines[i]
        line = raw.strip()
        i += 1
        if not line:
            continue
        if line == "\\end\\":
            ended = True
            break
        if line.startswith("\\") and line.endswith("-grams:"):
            try:
                current = int(line[1:-len("-grams:")])
            except ValueError:
                raise ParseError(f"bad section header {line!r}", line=i) from None
            if not 1 <= current <= order:
                raise ParseError(f"section order {current} outside 1..{order}", line=i)
            continue
        if current is None:
            raise ParseError(f"entry before any section: {line!r}", line=i)
        parts = raw.split("\t")
        if len(parts) == 1:
            parts = line.split()
            if len(parts) < current + 1:
                raise ParseError(f"short entry: {line!r}", line=i)
            logp_s = parts[0]
            gram = tuple(parts[1:1 + current])
            bow_s = parts[1 + current] if len(parts) > current + 1 else None
        else:
            if len(parts) < 2:
                raise ParseError(f"short entry: {line!r}", line=i)
            logp_s = parts[0]
            gram = tuple(parts[1].split())
            bow_s = parts[2] if len(parts) > 2 else None
        if len(gram) != current:
            raise ParseError(
                f"{current}-gram entry has {len(gram)} tokens: {line!r}", line=i
            )
        try:
            logp = float(logp_s)
            bow = float(bow_s) if bow_s is not None else None
        except ValueError:
            raise ParseError(f"bad float in entry: {line!r}", line=i) from None
        tables[current - 1][gram] = (logp, bow)
    if not ended:
        raise ParseError("missing \\end\\ terminator")
    for n, expect in declared.items():
        got = len(tables[n - 1])
        if got != expect:
            raise ParseError(f"declared {expect} {n}-grams but found {got}")
    return ArpaModel(order=order, tables=tables)


def load_table(path: str) -> ArpaModel:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read())


def save_table(model: NGramModel | ArpaModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model.to_text())


def corpus_token_counts(corpus: Iterable) -> Counter:
    """Plain token frequencies, shared by the lexicon prior."""
    freq: Counter = Counter()
    for sentence in corpus:
        freq.update(_tokenize(sentence))
    return freq
