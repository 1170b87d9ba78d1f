"""Word lexicon and pool-constrained candidate generation.

A lexicon is a set of lowercase words with optional corpus frequencies.
Words are stored in a trie laid out as flat arrays so candidate lookup
walks the trie against per-position letter pools instead of
materializing the cross product of the pools.  An optional fallback
generator proposes the top-k most plausible non-words for pools no
lexicon word matches, scored by a positional letter model.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import ValidationError
from .keymap import ACTIVE_FINGERS, KeyMap, letter_pool

MAX_WORD_LEN = 24


@dataclass(frozen=True)
class CandidateConfig:
    """Knobs for candidate generation.

    ``fallback_k`` of 0 disables the non-word generator.
    ``fallback_penalty`` is subtracted from every fallback score so
    non-words rank below lexicon words of comparable plausibility.
    """

    max_word_len: int = MAX_WORD_LEN
    fallback_k: int = 0
    fallback_penalty: float = 5.0

    def __post_init__(self):
        if self.max_word_len < 1:
            raise ValidationError("max_word_len must be at least 1")
        if self.fallback_k < 0:
            raise ValidationError("fallback_k must be non-negative")


@dataclass(frozen=True)
class Candidate:
    word: str
    source: str  # "lexicon", "fallback", or "placeholder"
    score: float  # log prior


@dataclass(frozen=True)
class CandidatePool:
    """All candidate words for one typed word position."""

    position: int
    fingers: tuple[int, ...]
    pools: tuple[tuple[str, ...], ...]
    candidates: tuple[Candidate, ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValidationError(
                f"candidate pool at position {self.position} must be nonempty; "
                "use EmptyPool for no-match results"
            )

    def words(self) -> list[str]:
        return [c.word for c in self.candidates]


@dataclass(frozen=True)
class EmptyPool:
    """Marker result: no candidate matched and the fallback was off."""

    position: int
    fingers: tuple[int, ...]
    pools: tuple[tuple[str, ...], ...]


class Lexicon:
    """An immutable word set with frequencies and a flat-array trie."""

    def __init__(self, words: Iterable[str], freq: Mapping[str, int] | None = None,
                 max_word_len: int = MAX_WORD_LEN):
        kept: set[str] = set()
        dropped = 0
        for raw in words:
            w = raw.strip()
            if not w:
                continue
            if w.isascii() and w.isalpha() and w.islower() and len(w) <= max_word_len:
                kept.add(w)
            else:
                dropped += 1
        if not kept:
            raise ValidationError("lexicon has no usable words")
        self.words: tuple[str, ...] = tuple(sorted(kept))
        self.dropped: int = dropped
        self._word_set = frozenset(self.words)
        self._freq: dict[str, int] = {}
        if freq:
            for w, n in freq.items():
                if w in self._word_set and n > 0:
                    self._freq[w] = int(n)
        self._trie = _build_trie(self.words)
        self._handle = _kernels.prepare_trie(*self._trie)
        self._letter_models: dict[int, np.ndarray] = {}
        self._lengths = Counter(len(w) for w in self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._word_set

    def frequency(self, word: str) -> int:
        return self._freq.get(word, 0)

    def prior(self, word: str) -> float:
        """Log frequency prior, log(1 + count); 0 for unseen words."""
        return math.log1p(self._freq.get(word, 0))

    def matches(self, pools: tuple[tuple[str, ...], ...]) -> list[str]:
        """Lexicon words whose letter at each position is in that
        position's pool, in alphabetical order."""
        mask = np.zeros((len(pools), 26), dtype=np.uint8)
        for i, pool in enumerate(pools):
            for ch in pool:
                mask[i, ord(ch) - 97] = 1
        return _kernels.trie_search(self._handle, mask)

    def positional_letter_model(self, length: int) -> np.ndarray:
        """Per-position letter probabilities for words of ``length``.

        Add-one smoothed counts over lexicon words of exactly that
        length; uniform when the lexicon has no such words.  Shape
        (length, 26), rows sum to 1.
        """
        model = self._letter_models.get(length)
        if model is None:
            counts = np.ones((length, 26), dtype=np.float64)
            for w in self.words:
                if len(w) == length:
                    for i, ch in enumerate(w):
                        counts[i, ord(ch) - 97] += 1.0
            model = counts / counts.sum(axis=1, keepdims=True)
            model.setflags(write=False)
            self._letter_models[length] = model
        return model


def _build_trie(words: tuple[str, ...]):
    """Flatten a letter trie into CSR arrays (edges sorted by letter)."""
    children: list[dict[int, int]] = [{}]
    terminal = [False]
    for w in words:
        node = 0
        for ch in w:
            li = ord(ch) - 97
            nxt = children[node].get(li)
            if nxt is None:
                nxt = len(children)
                children.append({})
                terminal.append(False)
                children[node][li] = nxt
            node = nxt
        terminal[node] = True
    n_nodes = len(children)
    first_edge = np.zeros(n_nodes + 1, dtype=np.int32)
    edge_letter: list[int] = []
    edge_child: list[int] = []
    for node, edges in enumerate(children):
        first_edge[node] = len(edge_letter)
        for li in sorted(edges):
            edge_letter.append(li)
            edge_child.append(edges[li])
    first_edge[n_nodes] = len(edge_letter)
    return (
        first_edge,
        np.asarray(edge_letter, dtype=np.int8),
        np.asarray(edge_child, dtype=np.int32),
        np.asarray(terminal, dtype=np.uint8),
    )


def _read_bundled(name: str) -> str:
    return resources.files("fingertype").joinpath("data", name).read_text(encoding="utf-8")


def count_corpus_frequencies(lines: Iterable[str]) -> Counter:
    """Token counts over a tokenized text, one sentence per line."""
    freq: Counter = Counter()
    for line in lines:
        freq.update(line.split())
    return freq


def load_lexicon(wordlist_path: str | None = None,
                 corpus_path: str | None = None,
                 max_word_len: int = MAX_WORD_LEN) -> Lexicon:
    """Load a lexicon from a wordlist file and a frequency corpus.

    Either path may be None to use the bundled data files.  The
    wordlist has one word per line; the corpus has one sentence per
    line and only supplies frequency counts.
    """
    if wordlist_path is None:
        words_text = _read_bundled("words.txt")
    else:
        with open(wordlist_path, encoding="utf-8") as fh:
            words_text = fh.read()
    if corpus_path is None:
        corpus_text = _read_bundled("corpus.txt")
    else:
        with open(corpus_path, encoding="utf-8") as fh:
            corpus_text = fh.read()
    freq = count_corpus_frequencies(corpus_text.splitlines())
    return Lexicon(words_text.split(), freq=freq, max_word_len=max_word_len)


def fallback_candidates(pools: tuple[tuple[str, ...], ...], k: int,
                        letter_model: np.ndarray,
                        exclude: frozenset[str] | set[str] = frozenset()) -> list[tuple[str, float]]:
    """Top-k strings over the pools by positional letter-model score.

    Enumerates pool combinations best-first with a heap, so only on
    the order of k states are expanded rather than the full product.
    Strings in ``exclude`` (typically the lexicon matches) are skipped.
    Returns (string, log score) pairs sorted by score descending, ties
    by string ascending; fewer than k when the pools cannot produce k
    distinct strings.
    """
    if k <= 0:
        return []
    if letter_model.shape != (len(pools), 26):
        raise ValidationError(
            f"letter model shape {letter_model.shape} does not match {len(pools)} pools"
        )
    options: list[list[tuple[float, str]]] = []
    for i, pool in enumerate(pools):
        if not pool:
            raise ValidationError(f"empty pool at position {i}")
        opts = sorted((-math.log(letter_model[i, ord(ch) - 97]), ch) for ch in pool)
        options.append(opts)
    start = (0,) * len(pools)
    start_cost = sum(opts[0][0] for opts in options)
    heap: list[tuple[float, str, tuple[int, ...]]] = [
        (start_cost, "".join(opts[0][1] for opts in options), start)
    ]
    seen = {start}
    out: list[tuple[str, float]] = []
    while heap and len(out) < k:
        cost, word, idxs = heapq.heappop(heap)
        if word not in exclude:
            out.append((word, -cost))
        for pos in range(len(pools)):
            nxt = idxs[pos] + 1
            if nxt < len(options[pos]):
                child = idxs[:pos] + (nxt,) + idxs[pos + 1:]
                if child not in seen:
                    seen.add(child)
                    cost2 = cost - options[pos][idxs[pos]][0] + options[pos][nxt][0]
                    word2 = word[:pos] + options[pos][nxt][1] + word[pos + 1:]
                    heapq.heappush(heap, (cost2, word2, child))
    return out


def candidate_words(fingers: Iterable[int], lexicon: Lexicon, *,
                    keymap: KeyMap | None = None, mode: str = "canonical",
                    config: CandidateConfig | None = None,
                    position: int = 0) -> CandidatePool | EmptyPool:
    """All candidate words for one finger sequence.

    Looks up the letter pool of each finger (canonical or augmented),
    walks the lexicon trie under those pools, and optionally appends
    fallback non-words.  Candidates come back sorted by score
    descending, ties broken by word ascending.  Returns
    :class:`EmptyPool` when nothing matched and the fallback is off.
    """
    cfg = config or CandidateConfig()
    seq = tuple(fingers)
    if not seq:
        raise ValidationError("cannot generate candidates for an empty finger sequence")
    if len(seq) > cfg.max_word_len:
        raise ValidationError(
            f"finger sequence of length {len(seq)} exceeds max word length {cfg.max_word_len}"
        )
    for f in seq:
        if f not in ACTIVE_FINGERS:
            raise ValidationError(f"finger {f} does not type letters")
    if keymap is not None and mode == "canonical":
        # A custom keymap redefines the canonical pools; the augmented
        # table is only defined for the default letter homes.
        pools = tuple(keymap.pool(f) for f in seq)
        for i, pool in enumerate(pools):
            if not pool:
                raise ValidationError(
                    f"keymap assigns no letters to finger {seq[i]} (position {i})"
                )
    else:
        pools = tuple(letter_pool(f, mode).letters for f in seq)
    matches = lexicon.matches(pools)
    cands = [Candidate(w, "lexicon", lexicon.prior(w)) for w in matches]
    if cfg.fallback_k > 0:
        model = lexicon.positional_letter_model(len(seq))
        extra = fallback_candidates(pools, cfg.fallback_k, model, exclude=set(matches))
        cands.extend(
            Candidate(w, "fallback", score - cfg.fallback_penalty) for w, score in extra
        )
    if not cands:
        return EmptyPool(position=position, fingers=seq, pools=pools)
    cands.sort(key=lambda c: (-c.score, c.word))
    return CandidatePool(position=position, fingers=seq, pools=pools,
                         candidates=tuple(cands))
