"""Session fixtures shared across the suite.

The bundled lexicon and a trigram model trained on the bundled corpus
are expensive enough to build once and reuse everywhere.
"""

from __future__ import annotations

from importlib import resources

import pytest

from fingertype.decoder import NGramScorer
from fingertype.lexicon import Lexicon, load_lexicon
from fingertype.ngram import NGramModel, train


def bundled_corpus_lines() -> list[str]:
    text = resources.files("fingertype").joinpath(
        "data", "corpus.txt").read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip()]


@pytest.fixture(scope="session")
def corpus_lines() -> list[str]:
    return bundled_corpus_lines()


@pytest.fixture(scope="session")
def lexicon() -> Lexicon:
    return load_lexicon()


@pytest.fixture(scope="session")
def trigram(corpus_lines) -> NGramModel:
    return train(corpus_lines, order=3)


@pytest.fixture(scope="session")
def scorer(trigram) -> NGramScorer:
    return NGramScorer(trigram)
