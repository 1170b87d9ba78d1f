"""Stochastic finger-event channel.

Two corruption models sit between clean text and the decoder.  The
confusion model is an 8x8 row-stochastic matrix over the typing
fingers: each row keeps ``accuracy`` mass on the true finger and
splits the remainder 70% over ergonomically adjacent same-hand
fingers, 20% onto the mirror finger of the other hand, and 10%
uniformly over the remaining fingers (shares renormalize implicitly at
hand edges because adjacent sets shrink).  The variation model
reassigns individual letters to an alternate finger drawn from the
letter's augmented pool owners, modelling typists who reach with a
non-canonical finger.

Thumb (space) events pass through unchanged unless
``space_error_rate`` is positive, in which case a corrupted thumb
event emits a uniform draw over the eight typing fingers; the target
distribution for corrupted thumbs is a modelling choice documented
here, not a measured quantity.

All sampling is deterministic: streams derive from
``numpy.random.default_rng([seed, sentence_index])`` so a document can
be corrupted sentence by sentence in any order, or in parallel, with
identical results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError
from .keymap import (
    ACTIVE_FINGERS,
    AUGMENTED_POOLS,
    THUMBS,
    KeyMap,
    canonical_keymap,
)

_ROW_OF = {f: i for i, f in enumerate(ACTIVE_FINGERS)}

# Same-hand neighbours of each typing finger (thumbs excluded).
ADJACENT = {
    0: (1,),
    1: (0, 2),
    2: (1, 3),
    3: (2,),
    6: (7,),
    7: (6, 8),
    8: (7, 9),
    9: (8,),
}

# The same finger on the other hand.
MIRROR = {0: 9, 1: 8, 2: 7, 3: 6, 6: 3, 7: 2, 8: 1, 9: 0}

ADJACENT_SHARE = 0.7
MIRROR_SHARE = 0.2
DIFFUSE_SHARE = 0.1


@dataclass(frozen=True)
class ConfusionModel:
    """Row-stochastic confusion over the eight typing fingers.

    ``matrix[i, j]`` is the probability that intended finger
    ``ACTIVE_FINGERS[i]`` registers as ``ACTIVE_FINGERS[j]``.
    """

    matrix: np.ndarray
    space_error_rate: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (8, 8):
            raise ValidationError(f"confusion matrix must be 8x8, got {m.shape}")
        if (m < 0).any():
            raise ValidationError("confusion matrix entries must be non-negative")
        sums = m.sum(axis=1)
        if not np.allclose(sums, 1.0, atol=1e-9, rtol=0.0):
            raise ValidationError(f"confusion matrix rows must sum to 1, got {sums}")
        if not 0.0 <= self.space_error_rate <= 1.0:
            raise ValidationError("space_error_rate must be in [0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def probability(self, intended: int, emitted: int) -> float:
        return float(self.matrix[_ROW_OF[intended], _ROW_OF[emitted]])

    def to_json(self) -> str:
        doc = {
            "type": "confusion",
            "fingers": list(ACTIVE_FINGERS),
            "matrix": [[float(x) for x in row] for row in self.matrix],
            "space_error_rate": self.space_error_rate,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ConfusionModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        if doc.get("type") != "confusion":
            raise ParseError("expected a confusion model document")
        return cls(
            matrix=np.asarray(doc["matrix"], dtype=np.float64),
            space_error_rate=float(doc.get("space_error_rate", 0.0)),
        )


def default_confusion(accuracy: float, space_error_rate: float = 0.0) -> ConfusionModel:
    """Build the standard confusion matrix at a given per-event accuracy.

    Each row places ``accuracy`` on the diagonal.  The remaining mass
    splits 70/20/10 over adjacent same-hand fingers (evenly within the
    set), the mirror finger, and the rest of the fingers (evenly).
    """
    if not 0.0 <= accuracy <= 1.0:
        raise ValidationError("accuracy must be in [0, 1]")
    m = np.zeros((8, 8), dtype=np.float64)
    for f in ACTIVE_FINGERS:
        i = _ROW_OF[f]
        off = 1.0 - accuracy
        m[i, i] = accuracy
        adj = ADJACENT[f]
        mirror = MIRROR[f]
        rest = [g for g in ACTIVE_FINGERS if g != f and g not in adj and g != mirror]
        for g in adj:
            m[i, _ROW_OF[g]] += off * ADJACENT_SHARE / len(adj)
        m[i, _ROW_OF[mirror]] += off * MIRROR_SHARE
        for g in rest:
            m[i, _ROW_OF[g]] += off * DIFFUSE_SHARE / len(rest)
    return ConfusionModel(matrix=m, space_error_rate=space_error_rate)


@dataclass(frozen=True)
class VariationModel:
    """Per-letter alternate finger assignments.

    ``alternates`` maps a letter to ``(finger, probability)``: each
    time the letter is typed, with that probability it is produced by
    the alternate finger instead of its canonical home.  Alternates
    must belong to the letter's augmented pool owners.
    """

    alternates: dict[str, tuple[int, float]] = field(default_factory=dict)

    def __post_init__(self):
        for letter, (finger, p) in self.alternates.items():
            if not ("a" <= letter <= "z" and len(letter) == 1):
                raise ValidationError(f"invalid letter {letter!r} in variation model")
            owners = {f for f, pool in AUGMENTED_POOLS.items() if letter in pool}
            if finger not in owners:
                raise ValidationError(
                    f"alternate finger {finger} for {letter!r} is outside its "
                    f"augmented owners {sorted(owners)}"
                )
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"variation probability for {letter!r} must be in [0, 1]")

    def to_json(self) -> str:
        doc = {
            "type": "variation",
            "alternates": {
                letter: {"finger": f, "probability": p}
                for letter, (f, p) in sorted(self.alternates.items())
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VariationModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        if doc.get("type") != "variation":
            raise ParseError("expected a variation model document")
        alternates = {
            letter: (int(spec["finger"]), float(spec["probability"]))
            for letter, spec in doc.get("alternates", {}).items()
        }
        return cls(alternates=alternates)


def default_variation(probability: float) -> VariationModel:
    """Alternate every letter that has a non-canonical augmented owner.

    Letters picked up by another finger in the augmented table (w/s/x
    by the left middle, t/g/b by the right index, o/l/p by the right
    middle) switch to that finger with the given probability.
    """
    if not 0.0 <= probability <= 1.0:
        raise ValidationError("variation probability must be in [0, 1]")
    km = canonical_keymap()
    alternates: dict[str, tuple[int, float]] = {}
    for finger, pool in AUGMENTED_POOLS.items():
        for letter in pool:
            if km.finger_for(letter) != finger:
                alternates[letter] = (finger, probability)
    return VariationModel(alternates=alternates)


def event_rng(seed: int, sentence_index: int = 0) -> np.random.Generator:
    """The per-sentence random stream used by both corruption steps."""
    if seed < 0 or sentence_index < 0:
        raise ValidationError("seed and sentence_index must be non-negative")
    return np.random.default_rng([seed, sentence_index])


def perturb(events: list[int], model: ConfusionModel, seed: int,
            sentence_index: int = 0) -> list[int]:
    """Corrupt a finger-event sequence through the confusion model.

    Letter events are resampled from their matrix row; thumb events
    pass through, or with probability ``space_error_rate`` emit a
    uniform typing finger.  Output length always equals input length.
    Deterministic in (events, model, seed, sentence_index).
    """
    for f in events:
        if f not in _ROW_OF and f not in THUMBS:
            raise ValidationError(f"invalid finger event {f}")
    rng = event_rng(seed, sentence_index)
    if not events:
        return []
    arr = np.asarray(events, dtype=np.int64)
    active_mask = np.isin(arr, ACTIVE_FINGERS)
    out = arr.copy()
    u = rng.random(arr.shape[0])
    if active_mask.any():
        rows = np.array([_ROW_OF[f] for f in arr[active_mask]], dtype=np.int64)
        cum = np.cumsum(model.matrix, axis=1)
        idx = (u[active_mask][:, None] > cum[rows]).sum(axis=1)
        idx = np.minimum(idx, 7)
        out[active_mask] = np.asarray(ACTIVE_FINGERS, dtype=np.int64)[idx]
    if model.space_error_rate > 0.0:
        thumb_mask = ~active_mask
        if thumb_mask.any():
            v = rng.random(int(thumb_mask.sum()))
            hit = u[thumb_mask] < model.space_error_rate
            repl = np.asarray(ACTIVE_FINGERS, dtype=np.int64)[
                np.floor(v * 8).astype(np.int64).clip(0, 7)
            ]
            slot = out[thumb_mask]
            slot[hit] = repl[hit]
            out[thumb_mask] = slot
    return out.tolist()


def apply_variation(text: str, model: VariationModel, seed: int,
                    sentence_index: int = 0,
                    keymap: KeyMap | None = None) -> list[int]:
    """Encode text to finger events with per-letter typist variation.

    Each letter draws one uniform sample; letters with an alternate
    assignment switch to the alternate finger when the draw falls
    under the configured probability.  Spaces always map to the
    keymap's thumb.  One draw happens per character regardless of
    whether the letter has an alternate, so streams stay aligned
    across models.
    """
    km = keymap or canonical_keymap()
    rng = event_rng(seed, sentence_index)
    if not text:
        return []
    draws = rng.random(len(text))
    events: list[int] = []
    for i, ch in enumerate(text):
        if ch == " ":
            events.append(km.space_finger)
            continue
        if not "a" <= ch <= "z":
            raise ValidationError(f"unsupported character {ch!r} at index {i}")
        alt = model.alternates.get(ch)
        if alt is not None and draws[i] < alt[1]:
            events.append(alt[0])
        else:
            events.append(km.finger_for(ch))
    return events


def expected_accuracy(model: ConfusionModel) -> float:
    """Mean diagonal mass, the per-event accuracy the matrix encodes."""
    return float(np.mean(np.diag(model.matrix)))


def load_model(text: str) -> ConfusionModel | VariationModel:
    """Load either model kind from its JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    kind = doc.get("type")
    if kind == "confusion":
        return ConfusionModel.from_json(text)
    if kind == "variation":
        return VariationModel.from_json(text)
    raise ParseError(f"unknown model type {kind!r}")
