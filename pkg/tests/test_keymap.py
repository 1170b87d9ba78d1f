"""Finger mapping: pool tables, text encoding, serialization."""

from __future__ import annotations

import random
import string

import pytest

from fingertype.errors import ParseError, ValidationError
from fingertype.keymap import (
    ACTIVE_FINGERS,
    AUGMENTED_POOLS,
    CANONICAL_POOLS,
    THUMBS,
    KeyMap,
    canonical_keymap,
    fingers_for_text,
    format_keymap,
    format_pool_table,
    letter_pool,
    normalize_text,
    parse_keymap,
    split_words,
)

EXPECTED_CANONICAL = {
    0: "aqz",
    1: "swx",
    2: "cde",
    3: "bfgrtv",
    6: "hjmnuy",
    7: "ik",
    8: "lo",
    9: "p",
}

EXPECTED_AUGMENTED = {
    0: "aqz",
    1: "swx",
    2: "cdeswx",
    3: "bfgrtv",
    6: "bghjmntuy",
    7: "iklop",
    8: "lo",
    9: "p",
}


def test_active_fingers_and_thumbs():
    assert ACTIVE_FINGERS == (0, 1, 2, 3, 6, 7, 8, 9)
    assert THUMBS == (4, 5)
    assert not set(ACTIVE_FINGERS) & set(THUMBS)


def test_canonical_pools_partition_alphabet():
    seen: set[str] = set()
    for finger, letters in CANONICAL_POOLS.items():
        pool = set(letters)
        assert not pool & seen, f"finger {finger} overlaps another pool"
        seen |= pool
    assert seen == set(string.ascii_lowercase)


def test_canonical_pool_contents():
    assert set(CANONICAL_POOLS) == set(ACTIVE_FINGERS)
    for finger, letters in EXPECTED_CANONICAL.items():
        assert CANONICAL_POOLS[finger] == tuple(letters)


def test_augmented_pool_contents():
    assert set(AUGMENTED_POOLS) == set(ACTIVE_FINGERS)
    for finger, letters in EXPECTED_AUGMENTED.items():
        assert AUGMENTED_POOLS[finger] == tuple(letters)


def test_augmented_pools_contain_canonical():
    for finger in ACTIVE_FINGERS:
        assert set(CANONICAL_POOLS[finger]) <= set(AUGMENTED_POOLS[finger])
    grew = {f for f in ACTIVE_FINGERS
            if set(AUGMENTED_POOLS[f]) > set(CANONICAL_POOLS[f])}
    assert grew == {2, 6, 7}


def test_augmented_pools_cover_alphabet():
    union = set()
    for letters in AUGMENTED_POOLS.values():
        union |= set(letters)
    assert union == set(string.ascii_lowercase)


def test_letter_pool_accessors():
    assert letter_pool(3).letters == tuple("bfgrtv")
    assert letter_pool(6, mode="augmented").letters == tuple("bghjmntuy")
    with pytest.raises(ValidationError):
        letter_pool(4)
    with pytest.raises(ValidationError):
        letter_pool(3, mode="fancy")


def test_canonical_keymap_assignments():
    km = canonical_keymap()
    assert km.space_finger == 4
    for finger, letters in CANONICAL_POOLS.items():
        for letter in letters:
            assert km.finger_for(letter) == finger
    km5 = canonical_keymap(space_finger=5)
    assert km5.space_finger == 5


def test_keymap_pool_inverts_mapping():
    km = canonical_keymap()
    for finger in ACTIVE_FINGERS:
        assert km.pool(finger) == CANONICAL_POOLS[finger]


def test_keymap_validation():
    base = dict(canonical_keymap().letter_to_finger)
    missing = dict(base)
    del missing["q"]
    with pytest.raises(ValidationError):
        KeyMap(letter_to_finger=missing)
    bad_finger = dict(base)
    bad_finger["q"] = 4
    with pytest.raises(ValidationError):
        KeyMap(letter_to_finger=bad_finger)
    with pytest.raises(ValidationError):
        KeyMap(letter_to_finger=base, space_finger=3)


def test_normalize_text():
    assert normalize_text("  This   HAS\ttwo\nparts ") == "this has two parts"
    assert normalize_text("") == ""
    assert normalize_text("   ") == ""
    assert normalize_text("abc") == "abc"


def test_fingers_for_text_known_words():
    assert fingers_for_text("this") == [3, 6, 7, 1]
    assert fingers_for_text("two parts") == [3, 1, 8, 4, 9, 0, 3, 3, 1]
    assert fingers_for_text("has") == [6, 0, 1]


def test_fingers_for_text_space_finger():
    km = canonical_keymap(space_finger=5)
    assert fingers_for_text("a b", km) == [0, 5, 3]


def test_fingers_for_text_rejects_unnormalized():
    with pytest.raises(ValidationError):
        fingers_for_text("Two")
    with pytest.raises(ValidationError):
        fingers_for_text("two  parts")


def test_fingers_for_text_rejects_bad_characters():
    with pytest.raises(ValidationError) as err:
        fingers_for_text("ab3")
    assert "2" in str(err.value)


def test_fingers_round_trip_random_sentences():
    rng = random.Random(99)
    km = canonical_keymap()
    inverse = {f: set(p) for f, p in CANONICAL_POOLS.items()}
    for _ in range(50):
        words = [
            "".join(rng.choice(string.ascii_lowercase)
                    for _ in range(rng.randint(1, 8)))
            for _ in range(rng.randint(1, 5))
        ]
        text = " ".join(words)
        events = fingers_for_text(text, km)
        assert len(events) == len(text)
        for ch, f in zip(text, events):
            if ch == " ":
                assert f == km.space_finger
            else:
                assert ch in inverse[f]


def test_split_words():
    assert split_words([3, 1, 8, 4, 9]) == [[3, 1, 8], [9]]
    assert split_words([4, 3, 4, 4, 1, 5]) == [[3], [1]]
    assert split_words([4, 5]) == []
    assert split_words([]) == []


def test_format_parse_keymap_round_trip():
    km = canonical_keymap(space_finger=5)
    text = format_keymap(km)
    back = parse_keymap(text)
    assert back.letter_to_finger == km.letter_to_finger
    assert back.space_finger == 5


def test_parse_keymap_defaults_space_to_left_thumb():
    text = "\n".join(
        f"{letter}\t{finger}"
        for finger, letters in CANONICAL_POOLS.items()
        for letter in letters
    )
    km = parse_keymap(text)
    assert km.space_finger == 4


def test_parse_keymap_errors_carry_line_numbers():
    good = format_keymap(canonical_keymap())
    with pytest.raises(ParseError) as err:
        parse_keymap("q\tnope\n")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_keymap(good + "q\t0\n")
    assert "duplicate" in str(err.value)
    with pytest.raises(ParseError) as err:
        parse_keymap("Q\t0\n")
    assert "line 1" in str(err.value)
    with pytest.raises(ParseError):
        parse_keymap("q 0\n")


def test_parse_keymap_skips_blank_and_comment_lines():
    text = "# home row\n\n" + format_keymap(canonical_keymap())
    assert parse_keymap(text).space_finger == 4


def test_format_pool_table_line_counts():
    canonical = format_pool_table("canonical").strip().splitlines()
    augmented = format_pool_table("augmented").strip().splitlines()
    assert len(canonical) == 26
    assert len(augmented) == 35
    assert canonical == sorted(canonical)
    for line in canonical:
        letter, finger = line.split("\t")
        assert CANONICAL_POOLS[int(finger)].count(letter) == 1
    with pytest.raises(ValidationError):
        format_pool_table("other")
