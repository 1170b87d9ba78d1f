"""Kernel backends: edit-operation counts and trie search.

Both backends must agree with each other and with independent
reference implementations written here from scratch.
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
from functools import lru_cache

import numpy as np
import pytest

from fingertype._kernels import _pykernels
from fingertype.lexicon import _build_trie

_ckernels = pytest.importorskip(
    "fingertype._kernels._ckernels",
    reason="compiled kernel extension missing; build with pip install -e .",
)

BACKENDS = [_pykernels, _ckernels]


def oracle_edit_ops(ref, hyp):
    """Independent alignment counter.

    Memoized recursion for the distance, then a backtrack that
    resolves ties the documented way: substitution (or match) first,
    deletion second, insertion last.
    """
    a, b = list(ref), list(hyp)

    @lru_cache(maxsize=None)
    def dist(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            dist(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
            dist(i - 1, j) + 1,
            dist(i, j - 1) + 1,
        )

    subs = dels = inss = 0
    i, j = len(a), len(b)
    while i > 0 or j > 0:
        here = dist(i, j)
        if i > 0 and j > 0 and dist(i - 1, j - 1) + (a[i - 1] != b[j - 1]) == here:
            subs += a[i - 1] != b[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and dist(i - 1, j) + 1 == here:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return subs, dels, inss


def as_i32(seq):
    return np.asarray(list(seq), dtype=np.int32)


KNOWN_CASES = [
    ("abc", "abc", (0, 0, 0)),
    ("abc", "axc", (1, 0, 0)),
    ("abc", "ab", (0, 1, 0)),
    ("ab", "abc", (0, 0, 1)),
    ("", "abc", (0, 0, 3)),
    ("abc", "", (0, 3, 0)),
    ("", "", (0, 0, 0)),
    ("kitten", "sitting", (2, 0, 1)),
    # distance 2 explained by two substitutions or delete+insert; the
    # substitution-first rule must pick the former
    ("ab", "ba", (2, 0, 0)),
]


@pytest.mark.parametrize("backend", BACKENDS, ids=["python", "cython"])
def test_edit_ops_known_cases(backend):
    for ref, hyp, expected in KNOWN_CASES:
        r = as_i32(ord(c) for c in ref)
        h = as_i32(ord(c) for c in hyp)
        assert tuple(backend.edit_ops(r, h)) == expected, (ref, hyp)


def test_edit_ops_matches_oracle_and_backends_agree():
    rng = random.Random(4242)
    for _ in range(300):
        alpha = rng.randint(2, 6)
        ref = [rng.randrange(alpha) for _ in range(rng.randint(0, 12))]
        hyp = [rng.randrange(alpha) for _ in range(rng.randint(0, 12))]
        expected = oracle_edit_ops(ref, hyp)
        got_py = tuple(_pykernels.edit_ops(as_i32(ref), as_i32(hyp)))
        got_cy = tuple(_ckernels.edit_ops(as_i32(ref), as_i32(hyp)))
        assert got_py == expected, (ref, hyp)
        assert got_cy == expected, (ref, hyp)
        # counts must be plain ints in both backends; numpy scalars
        # would poison downstream JSON reports
        assert all(type(v) is int for v in got_py + got_cy)


def test_edit_ops_cost_is_levenshtein_distance():
    rng = random.Random(7)
    for _ in range(100):
        ref = [rng.randrange(4) for _ in range(rng.randint(0, 10))]
        hyp = [rng.randrange(4) for _ in range(rng.randint(0, 10))]
        s, d, i = _pykernels.edit_ops(as_i32(ref), as_i32(hyp))
        assert s + d + i == oracle_edit_ops(ref, hyp)[0] + \
            oracle_edit_ops(ref, hyp)[1] + oracle_edit_ops(ref, hyp)[2]
        # sequence length bookkeeping must balance
        assert len(ref) - d == len(hyp) - i


WORDS = tuple(sorted([
    "a", "an", "ant", "and", "band", "bane", "bat", "cat", "can",
    "cane", "dog", "dot", "den", "do", "go", "got", "gone", "net",
    "not", "ten", "tan", "tin", "ton", "zap",
]))


def make_mask(pools):
    mask = np.zeros((len(pools), 26), dtype=np.uint8)
    for i, pool in enumerate(pools):
        for ch in pool:
            mask[i, ord(ch) - 97] = 1
    return mask


def brute_force_search(words, pools):
    out = [
        w for w in words
        if len(w) == len(pools) and all(c in p for c, p in zip(w, pools))
    ]
    return sorted(out)


@pytest.mark.parametrize("backend", BACKENDS, ids=["python", "cython"])
def test_trie_search_small_lexicon(backend):
    handle = backend.prepare_trie(*_build_trie(WORDS))
    cases = [
        ("abc", "ao", "tg"),      # expects nothing
        ("bcdgntz", "ao", "tng"), # bat cat can dog don... filtered by 3rd letter
        ("a",),
        ("ac", "an", "tn", "de"),
    ]
    for pools in cases:
        got = backend.trie_search(handle, make_mask(pools))
        assert got == brute_force_search(WORDS, pools)


@pytest.mark.parametrize("backend", BACKENDS, ids=["python", "cython"])
def test_trie_search_random_masks(backend):
    rng = random.Random(31337)
    handle = backend.prepare_trie(*_build_trie(WORDS))
    letters = "abcdegintoz"
    for _ in range(200):
        depth = rng.randint(1, 5)
        pools = tuple(
            "".join(sorted(rng.sample(letters, rng.randint(1, 6))))
            for _ in range(depth)
        )
        got = backend.trie_search(handle, make_mask(pools))
        assert got == brute_force_search(WORDS, pools)
        assert got == sorted(got)


def test_trie_search_empty_mask_depth():
    for backend in BACKENDS:
        handle = backend.prepare_trie(*_build_trie(WORDS))
        assert backend.trie_search(handle, np.zeros((0, 26), dtype=np.uint8)) == []


def test_backends_agree_on_bundled_lexicon(lexicon):
    rng = random.Random(2024)
    py_handle = _pykernels.prepare_trie(*lexicon._trie)
    cy_handle = _ckernels.prepare_trie(*lexicon._trie)
    for _ in range(100):
        depth = rng.randint(1, 8)
        pools = tuple(
            "".join(sorted(rng.sample("abcdefghijklmnopqrstuvwxyz",
                                      rng.randint(1, 9))))
            for _ in range(depth)
        )
        mask = make_mask(pools)
        assert _pykernels.trie_search(py_handle, mask) == \
            _ckernels.trie_search(cy_handle, mask)


def run_python(code: str, **env_overrides) -> str:
    env = dict(os.environ)
    env.pop("FINGERTYPE_PURE_PY", None)
    env.update(env_overrides)
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True,
        env=env, check=True,
    )
    return out.stdout.strip()


def test_backend_selection():
    code = "import fingertype; print(fingertype.KERNEL_BACKEND)"
    assert run_python(code) == "cython"
    assert run_python(code, FINGERTYPE_PURE_PY="1") == "python"


def test_backend_constants():
    assert _pykernels.BACKEND == "python"
    assert _ckernels.BACKEND == "cython"
