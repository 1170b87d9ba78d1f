"""Sentence decoding over per-word candidate pools.

A sentence arrives as one candidate pool per word position.  The
decoder runs a width-limited beam over the pools: at each position
every surviving hypothesis is extended with every candidate word, a
pluggable scorer assigns each extension an incremental log score, the
candidate's lexicon prior is mixed in with ``prior_weight``, and the
best ``beam_width`` extensions survive.  Ties break deterministically
by word sequence, so decoding is reproducible bit for bit.

Scorers implement one method, ``logprobs(context, candidates,
prompt)``, returning one log score per candidate.  ``NGramScorer``
wraps an in-process n-gram model and conditions on sentence-initial
``<s>`` markers.  ``ExternalScorer`` drives a subprocess speaking JSON
Lines over stdin/stdout: requests are
``{"id", "context", "candidates", "prompt"}`` and responses echo the
id with a ``logprobs`` array aligned to the candidates.  The prompt, a
rendering of the whole sentence's pools
(``Select exactly N words: a b <SEP> c <SEP>``), gives sentence-level
scorers the full search space up front.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import isfinite
from typing import Protocol, Sequence

from .errors import ConfigError, DecodeError, ScorerError, ValidationError
from .lexicon import Candidate, CandidatePool, EmptyPool
from .ngram import BOS

SEP = "<SEP>"


def serialize_prompt(groups: Sequence[Sequence[str]]) -> str:
    """Render candidate groups into the fixed prompt template.

    ``Select exactly N words:`` followed by each group's words
    space-separated, each group closed by ``<SEP>``.
    """
    if not groups:
        raise ValidationError("prompt needs at least one candidate group")
    rendered = []
    for i, group in enumerate(groups):
        words = list(group)
        if not words:
            raise ValidationError(f"candidate group {i} is empty")
        for w in words:
            if not w or " " in w or w == SEP:
                raise ValidationError(f"invalid candidate word {w!r} in group {i}")
        rendered.append(" ".join(words))
    n = len(groups)
    return f"Select exactly {n} words: " + " <SEP> ".join(rendered) + " <SEP>"


class Scorer(Protocol):
    def logprobs(self, context: Sequence[str], candidates: Sequence[str],
                 prompt: str) -> list[float]:
        """One log score per candidate, given the decoded context."""


class NGramScorer:
    """Scores candidates with an in-process n-gram model.

    The decoded context is padded with sentence-start markers so the
    first word is conditioned on ``<s>`` context of full width.  Safe
    to share across decoding threads (reads only).
    """

    def __init__(self, model):
        self.model = model
        self._pad = [BOS] * (model.order - 1)

    def logprobs(self, context: Sequence[str], candidates: Sequence[str],
                 prompt: str) -> list[float]:
        ctx = self._pad + list(context)
        return [self.model.logprob(w, ctx) for w in candidates]


class ExternalScorer:
    """Drives a scorer subprocess over JSON Lines.

    One request per line on stdin, one response per line on stdout.
    Responses must echo the request id and carry exactly one finite
    log score per candidate; anything else (timeout, exit, junk,
    mismatched id or length) raises :class:`ScorerError`.  A lock
    serializes requests, so one instance may be shared by decoding
    threads.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = 10.0):
        if isinstance(command, str):
            argv = shlex.split(command)
        else:
            argv = list(command)
        if not argv:
            raise ConfigError("external scorer command is empty")
        self._timeout = timeout
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ScorerError(f"cannot start scorer {argv[0]!r}: {exc}") from exc
        self._lock = threading.Lock()
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._next_id = 0
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def logprobs(self, context: Sequence[str], candidates: Sequence[str],
                 prompt: str) -> list[float]:
        with self._lock:
            self._next_id += 1
            request = {
                "id": self._next_id,
                "context": list(context),
                "candidates": list(candidates),
                "prompt": prompt,
            }
            try:
                assert self._proc.stdin is not None
                self._proc.stdin.write(json.dumps(request) + "\n")
                self._proc.stdin.flush()
            except (OSError, ValueError) as exc:
                raise ScorerError(f"scorer process is gone: {exc}") from exc
            try:
                line = self._lines.get(timeout=self._timeout)
            except queue.Empty:
                raise ScorerError(
                    f"scorer timed out after {self._timeout}s"
                ) from None
            if line is None:
                raise ScorerError("scorer closed its output")
            try:
                response = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScorerError(f"scorer sent invalid JSON: {exc}") from None
            if response.get("id") != request["id"]:
                raise ScorerError(
                    f"scorer answered id {response.get('id')!r} "
                    f"to request {request['id']}"
                )
            scores = response.get("logprobs")
            if not isinstance(scores, list) or len(scores) != len(candidates):
                raise ScorerError(
                    f"scorer returned {len(scores) if isinstance(scores, list) else 'no'} "
                    f"scores for {len(candidates)} candidates"
                )
            out = []
            for s in scores:
                if not isinstance(s, (int, float)) or not isfinite(s):
                    raise ScorerError(f"scorer returned a non-finite score: {s!r}")
                out.append(float(s))
            return out

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                assert self._proc.stdin is not None
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self) -> "ExternalScorer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


@dataclass(frozen=True)
class BeamConfig:
    beam_width: int = 8
    n_best: int = 1
    prior_weight: float = 0.5

    def __post_init__(self):
        if self.beam_width < 1:
            raise ConfigError("beam width must be at least 1")
        if not 1 <= self.n_best <= self.beam_width:
            raise ConfigError("n_best must be between 1 and the beam width")
        if self.prior_weight < 0.0:
            raise ConfigError("prior_weight must be non-negative")


@dataclass(frozen=True)
class DecodeResult:
    words: tuple[str, ...]
    score: float
    nbest: tuple[tuple[str, float], ...] = field(default_factory=tuple)

    @property
    def text(self) -> str:
        return " ".join(self.words)


def decode(pools: Sequence[CandidatePool], scorer: Scorer,
           config: BeamConfig | None = None) -> DecodeResult:
    """Beam-search the best word sequence over the sentence's pools.

    Hypothesis score is the running sum of scorer log probabilities
    plus ``prior_weight`` times each chosen candidate's prior.  Equal
    scores rank by word sequence ascending, making results unique.
    With a beam at least as wide as the product of pool sizes this is
    exact search.
    """
    cfg = config or BeamConfig()
    if not pools:
        raise ValidationError("cannot decode a sentence with no word positions")
    for i, pool in enumerate(pools):
        if isinstance(pool, EmptyPool):
            raise ValidationError(
                f"unresolved empty pool at position {i}; "
                "apply resolve_empty_pools() first"
            )
        if not pool.candidates:
            raise ValidationError(f"pool at position {i} has no candidates")
    prompt = serialize_prompt([p.words() for p in pools])
    beam: list[tuple[tuple[str, ...], float]] = [((), 0.0)]
    for n, pool in enumerate(pools):
        words = [c.word for c in pool.candidates]
        extensions: list[tuple[tuple[str, ...], float]] = []
        for hyp_words, hyp_score in beam:
            try:
                scores = scorer.logprobs(hyp_words, words, prompt)
            except ScorerError as exc:
                raise DecodeError(str(exc), position=n) from exc
            if len(scores) != len(words):
                raise DecodeError(
                    f"scorer returned {len(scores)} scores for {len(words)} candidates",
                    position=n,
                )
            for cand, lp in zip(pool.candidates, scores):
                extensions.append(
                    (hyp_words + (cand.word,),
                     hyp_score + lp + cfg.prior_weight * cand.score)
                )
        extensions.sort(key=lambda h: (-h[1], h[0]))
        beam = extensions[:cfg.beam_width]
    nbest = tuple((" ".join(w), s) for w, s in beam[:cfg.n_best])
    best_words, best_score = beam[0]
    return DecodeResult(words=best_words, score=best_score, nbest=nbest)


def resolve_empty_pools(pools: Sequence[CandidatePool | EmptyPool],
                        policy: str = "placeholder") -> list[CandidatePool]:
    """Replace no-match positions according to the caller's policy.

    ``placeholder`` substitutes a ``?`` per typed letter, ``fallback``
    substitutes the alphabetically first letter of each position's
    pool, and ``error`` refuses to decode the sentence.
    """
    if policy not in ("placeholder", "fallback", "error"):
        raise ConfigError(f"unknown empty-pool policy {policy!r}")
    resolved: list[CandidatePool] = []
    for pool in pools:
        if not isinstance(pool, EmptyPool):
            resolved.append(pool)
            continue
        if policy == "error":
            raise ValidationError(
                f"no candidates for position {pool.position} "
                f"(fingers {list(pool.fingers)})"
            )
        if policy == "placeholder":
            word = "?" * len(pool.fingers)
            source = "placeholder"
        else:
            word = "".join(p[0] for p in pool.pools)
            source = "fallback"
        resolved.append(
            CandidatePool(
                position=pool.position,
                fingers=pool.fingers,
                pools=pool.pools,
                candidates=(Candidate(word, source, 0.0),),
            )
        )
    return resolved


def decode_document(sentences: Sequence[Sequence[CandidatePool]], scorer: Scorer,
                    config: BeamConfig | None = None,
                    workers: int = 1) -> list[DecodeResult]:
    """Decode independent sentences, optionally across worker threads.

    Output order follows input order and is identical for any worker
    count: each sentence decodes from its own pools only.
    """
    if workers < 1:
        raise ConfigError("workers must be at least 1")
    cfg = config or BeamConfig()
    if workers == 1 or len(sentences) <= 1:
        return [decode(pools, scorer, cfg) for pools in sentences]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: decode(p, scorer, cfg), sentences))
