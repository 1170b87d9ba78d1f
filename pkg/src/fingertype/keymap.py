"""Finger-to-letter key mapping.

Fingers are numbered 0..9 left pinky to right pinky.  Eight fingers
type letters (0-3 on the left hand, 6-9 on the right) and the thumbs
(4 and 5) type space.  The canonical assignment gives every letter
exactly one home finger, so the eight canonical letter pools partition
the alphabet.  The augmented pools extend three of the canonical pools
with letters that typists reach with a neighbouring finger in practice
(left middle picks up w/s/x, right index picks up t/g/b, right middle
picks up o/l/p); every augmented pool is a superset of its canonical
pool.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ValidationError

ACTIVE_FINGERS = (0, 1, 2, 3, 6, 7, 8, 9)
THUMBS = (4, 5)

FINGER_NAMES = {
    0: "left pinky",
    1: "left ring",
    2: "left middle",
    3: "left index",
    4: "left thumb",
    5: "right thumb",
    6: "right index",
    7: "right middle",
    8: "right ring",
    9: "right pinky",
}

# Canonical pools: one home finger per letter.
_CANONICAL = {
    0: "qaz",
    1: "wsx",
    2: "edc",
    3: "rfvtgb",
    6: "yhnujm",
    7: "ik",
    8: "ol",
    9: "p",
}

# Augmented pools: canonical pools plus commonly observed reach-overs.
_AUGMENTED = {
    0: "qaz",
    1: "wsx",
    2: "edcwsx",
    3: "rfvtgb",
    6: "yhnujmtgb",
    7: "ikolp",
    8: "ol",
    9: "p",
}

CANONICAL_POOLS = {f: tuple(sorted(s)) for f, s in _CANONICAL.items()}
AUGMENTED_POOLS = {f: tuple(sorted(s)) for f, s in _AUGMENTED.items()}

POOL_MODES = ("canonical", "augmented")


@dataclass(frozen=True)
class LetterPool:
    """The letters one finger can produce, in alphabetical order."""

    finger: int
    letters: tuple[str, ...]

    def __post_init__(self):
        if not self.letters:
            raise ValidationError(f"empty letter pool for finger {self.finger}")

    def __contains__(self, letter: str) -> bool:
        return letter in self.letters

    def __len__(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class KeyMap:
    """An assignment of every letter to one typing finger.

    ``letter_to_finger`` must cover exactly a-z, every value must be
    an active (non-thumb) finger, and ``space_finger`` must be one of
    the thumbs.
    """

    letter_to_finger: dict[str, int]
    space_finger: int = 4
    _pools: dict[int, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        letters = sorted(self.letter_to_finger)
        expected = [chr(c) for c in range(ord("a"), ord("z") + 1)]
        if letters != expected:
            missing = sorted(set(expected) - set(letters))
            extra = sorted(set(letters) - set(expected))
            raise ValidationError(
                f"keymap must cover exactly a-z (missing {missing}, extra {extra})"
            )
        for letter, finger in self.letter_to_finger.items():
            if finger not in ACTIVE_FINGERS:
                raise ValidationError(
                    f"letter {letter!r} assigned to non-typing finger {finger}"
                )
        if self.space_finger not in THUMBS:
            raise ValidationError(
                f"space finger must be a thumb (4 or 5), got {self.space_finger}"
            )
        pools: dict[int, list[str]] = {f: [] for f in ACTIVE_FINGERS}
        for letter in expected:
            pools[self.letter_to_finger[letter]].append(letter)
        object.__setattr__(
            self, "_pools", {f: tuple(v) for f, v in pools.items() if v}
        )

    def finger_for(self, letter: str) -> int:
        try:
            return self.letter_to_finger[letter]
        except KeyError:
            raise ValidationError(f"no finger assigned for {letter!r}") from None

    def pool(self, finger: int) -> tuple[str, ...]:
        """Letters this keymap assigns to ``finger`` (alphabetical)."""
        if finger not in ACTIVE_FINGERS:
            raise ValidationError(f"finger {finger} does not type letters")
        return self._pools.get(finger, ())


def canonical_keymap(space_finger: int = 4) -> KeyMap:
    """The default keymap with one home finger per letter."""
    mapping = {
        letter: finger for finger, pool in CANONICAL_POOLS.items() for letter in pool
    }
    return KeyMap(letter_to_finger=mapping, space_finger=space_finger)


def letter_pool(finger: int, mode: str = "canonical") -> LetterPool:
    """The canonical or augmented letter pool of an active finger."""
    if mode not in POOL_MODES:
        raise ValidationError(f"unknown pool mode {mode!r} (expected one of {POOL_MODES})")
    if finger not in ACTIVE_FINGERS:
        raise ValidationError(
            f"finger {finger} has no letter pool ({FINGER_NAMES.get(finger, 'unknown')})"
        )
    table = CANONICAL_POOLS if mode == "canonical" else AUGMENTED_POOLS
    return LetterPool(finger=finger, letters=table[finger])


def normalize_text(text: str) -> str:
    """Lowercase and collapse runs of whitespace to single spaces."""
    return " ".join(text.lower().split())


def fingers_for_text(text: str, keymap: KeyMap | None = None) -> list[int]:
    """Encode a sentence as the finger sequence that types it.

    The text must already be normalized: lowercase a-z words separated
    by single spaces, no leading or trailing space.  Characters outside
    that alphabet raise :class:`ValidationError` naming the offending
    position.  An empty string encodes to an empty sequence.
    """
    if keymap is None:
        keymap = canonical_keymap()
    if not text:
        return []
    if text != normalize_text(text):
        raise ValidationError(
            "text must be normalized (lowercase, single spaces, no surrounding "
            "whitespace); call normalize_text() first"
        )
    events: list[int] = []
    for i, ch in enumerate(text):
        if ch == " ":
            events.append(keymap.space_finger)
        elif "a" <= ch <= "z":
            events.append(keymap.letter_to_finger[ch])
        else:
            raise ValidationError(f"unsupported character {ch!r} at index {i}")
    return events


def split_words(events: list[int]) -> list[list[int]]:
    """Split a finger-event sequence into per-word runs at thumb events.

    Consecutive thumbs produce no empty words; leading and trailing
    thumbs are ignored.
    """
    words: list[list[int]] = []
    current: list[int] = []
    for f in events:
        if f in THUMBS:
            if current:
                words.append(current)
                current = []
        else:
            current.append(f)
    if current:
        words.append(current)
    return words


def format_keymap(keymap: KeyMap) -> str:
    """Serialize a keymap to text: one ``letter<TAB>finger`` line per
    letter in alphabetical order, then a ``SPACE<TAB>finger`` line."""
    lines = [f"{letter}\t{finger}" for letter, finger in sorted(keymap.letter_to_finger.items())]
    lines.append(f"SPACE\t{keymap.space_finger}")
    return "\n".join(lines) + "\n"


def parse_keymap(text: str) -> KeyMap:
    """Parse the text format produced by :func:`format_keymap`."""
    mapping: dict[str, int] = {}
    space_finger: int | None = None
    from .errors import ParseError

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"expected 'key<TAB>finger', got {raw!r}", line=lineno)
        key, finger_s = parts
        try:
            finger = int(finger_s)
        except ValueError:
            raise ParseError(f"finger must be an integer, got {finger_s!r}", line=lineno) from None
        if key == "SPACE":
            if space_finger is not None:
                raise ParseError("duplicate SPACE line", line=lineno)
            space_finger = finger
        elif len(key) == 1 and "a" <= key <= "z":
            if key in mapping:
                raise ParseError(f"duplicate letter {key!r}", line=lineno)
            mapping[key] = finger
        else:
            raise ParseError(f"unknown key {key!r}", line=lineno)
    if space_finger is None:
        space_finger = 4
    return KeyMap(letter_to_finger=mapping, space_finger=space_finger)


def format_pool_table(mode: str = "canonical") -> str:
    """Serialize a pool table: one ``letter<TAB>finger`` line per
    (letter, finger) pair.  Augmented pools repeat letters that more
    than one finger can produce."""
    if mode not in POOL_MODES:
        raise ValidationError(f"unknown pool mode {mode!r} (expected one of {POOL_MODES})")
    table = CANONICAL_POOLS if mode == "canonical" else AUGMENTED_POOLS
    pairs = sorted(
        (letter, finger) for finger, letters in table.items() for letter in letters
    )
    lines = [f"{letter}\t{finger}" for letter, finger in pairs]
    return "\n".join(lines) + "\n"
