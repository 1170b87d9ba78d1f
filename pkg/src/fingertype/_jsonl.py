"""JSON Lines plumbing shared by the CLI stages.

Record schemas:

* finger events: ``{"sentence": i, "ref": text?, "events": [ints]}``
* candidate pools: ``{"sentence": i, "position": j, "fingers": [...],
  "pools": [[letters...]...], "candidates": [{"word", "source",
  "score"}...]}`` or the same with ``"empty": true`` and no
  candidates
* decode output: ``{"sentence": i, "text": str, "score": float,
  "nbest": [[text, score]...]}``

Keys are written sorted so identical data gives identical bytes.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

from .errors import ParseError
from .lexicon import Candidate, CandidatePool, EmptyPool


def dump_records(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def parse_records(text: str) -> Iterator[tuple[int, dict]]:
    """Yield (line number, record) pairs; bad lines raise ParseError."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", line=lineno) from None
        if not isinstance(record, dict):
            raise ParseError("record must be a JSON object", line=lineno)
        yield lineno, record


def pool_record(sentence: int, pool: CandidatePool | EmptyPool) -> dict:
    record = {
        "sentence": sentence,
        "position": pool.position,
        "fingers": list(pool.fingers),
        "pools": [list(p) for p in pool.pools],
    }
    if isinstance(pool, EmptyPool):
        record["empty"] = True
    else:
        record["candidates"] = [
            {"word": c.word, "source": c.source, "score": c.score}
            for c in pool.candidates
        ]
    return record


def record_pool(record: dict, lineno: int) -> tuple[int, CandidatePool | EmptyPool]:
    """Reconstruct a pool from its record; returns (sentence, pool)."""
    try:
        sentence = int(record["sentence"])
        position = int(record["position"])
        fingers = tuple(int(f) for f in record["fingers"])
        pools = tuple(tuple(str(ch) for ch in p) for p in record["pools"])
        if record.get("empty"):
            return sentence, EmptyPool(position=position, fingers=fingers, pools=pools)
        candidates = tuple(
            Candidate(word=str(c["word"]), source=str(c["source"]),
                      score=float(c["score"]))
            for c in record["candidates"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad pool record: {exc}", line=lineno) from None
    return sentence, CandidatePool(position=position, fingers=fingers,
                                   pools=pools, candidates=candidates)


def group_pools(text: str) -> dict[int, list[CandidatePool | EmptyPool]]:
    """Group pool records by sentence, ordered by position."""
    grouped: dict[int, list[tuple[int, CandidatePool | EmptyPool]]] = {}
    for lineno, record in parse_records(text):
        sentence, pool = record_pool(record, lineno)
        grouped.setdefault(sentence, []).append((pool.position, pool))
    out: dict[int, list[CandidatePool | EmptyPool]] = {}
    for sentence in sorted(grouped):
        entries = sorted(grouped[sentence], key=lambda e: e[0])
        positions = [p for p, _ in entries]
        if positions != list(range(len(positions))):
            raise ParseError(
                f"sentence {sentence} has positions {positions}, expected "
                f"0..{len(positions) - 1}"
            )
        out[sentence] = [pool for _, pool in entries]
    return out
