# Copyright (c) 2026 The relevatr authors
"""Tests for the BM25 index."""

import math
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from relevatr.bm25 import Bm25Index, tokenize


rng = np.random.default_rng(1234)

VOCABULARY = [f"w{i}" for i in range(30)]


def _oracle(corpus: dict[str, list[str]], query: list[str], k1: float = 1.2, b: float = 0.75) -> dict[str, float]:
    """Direct evaluation of the Okapi BM25 formula with the non-negative idf."""
    n = len(corpus)
    avg_len = sum(len(terms) for terms in corpus.values()) / n
    df = Counter(term for terms in corpus.values() for term in set(terms))
    scores = {}
    for doc_id, terms in corpus.items():
        tf = Counter(terms)
        total = 0.0
        for term in query:
            if tf[term] == 0:
                continue
            idf = math.log(1 + (n - df[term] + 0.5) / (df[term] + 0.5))
            total += idf * tf[term] * (k1 + 1) / (tf[term] + k1 * (1 - b + b * len(terms) / avg_len))
        scores[doc_id] = total
    return scores


def _random_corpus(n_docs: int) -> dict[str, list[str]]:
    return {
        f"d{i:03d}": list(rng.choice(VOCABULARY, size=int(rng.integers(1, 40))))
        for i in range(n_docs)
    }


# Test cases for tokenize


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("NBA games, NBA!", ["nba", "games", "nba"]),
        ("", []),
        ("   ", []),
        ("snake_case and-dash", ["snake", "case", "and", "dash"]),
        ("Café 42", ["café", "42"]),
    ],
)
def test_tokenize(text: str, expected: list[str]) -> None:
    """Test lowercase alphanumeric tokenization with the default settings."""
    assert tokenize(text) == expected


def test_tokenize_options() -> None:
    """Test stop-word removal and suffix stripping when enabled."""
    assert tokenize("The games of the season", stopwords=True) == ["games", "season"]
    assert tokenize("played matches", stemming=True) == ["play", "match"]
    assert tokenize("is", stemming=True) == ["is"]


# Test cases for Bm25Index


def test_scores_match_formula() -> None:
    """Test score() and top_k() against a direct evaluation of the formula on random corpora."""
    for _ in range(100):
        corpus = _random_corpus(int(rng.integers(1, 51)))
        index = Bm25Index.build((doc_id, " ".join(terms)) for doc_id, terms in corpus.items())
        query = list(rng.choice(VOCABULARY, size=int(rng.integers(1, 6))))
        expected = _oracle(corpus, query)
        for doc_id, score in expected.items():
            assert index.score(query, doc_id) == pytest.approx(score, rel=1e-9, abs=1e-12)

        ranked = index.top_k(query, len(corpus))
        expected_order = sorted(expected, key=lambda doc_id: (-expected[doc_id], doc_id))
        assert [doc_id for doc_id, _ in ranked] == expected_order


def test_scores_are_non_negative() -> None:
    """Test that a term present in every document still scores >= 0."""
    index = Bm25Index.build([("a", "common x"), ("b", "common y"), ("c", "common z")])
    assert index.idf("common") > 0
    assert all(index.score(["common"], doc_id) >= 0 for doc_id in "abc")


def test_top_k_ties_and_exclusion() -> None:
    """Test ascending doc_id tie-breaking, exclusion and k larger than the corpus."""
    index = Bm25Index.build([("b", "same text"), ("a", "same text"), ("c", "other words")])
    assert index.top_k(["same"], 2) == index.top_k(["same"], 2)
    assert [doc_id for doc_id, _ in index.top_k(["same"], 2)] == ["a", "b"]
    assert [doc_id for doc_id, _ in index.top_k(["same"], 5, exclude={"a"})] == ["b", "c"]
    assert len(index.top_k(["same"], 10)) == 3  # noqa: PLR2004


def test_empty_query_scores_zero() -> None:
    """Test that an empty query scores every document 0."""
    index = Bm25Index.build([("a", "one"), ("b", "two")])
    assert index.top_k([], 2) == [("a", 0.0), ("b", 0.0)]


@pytest.mark.parametrize("k", [0, -1])
def test_top_k_rejects_invalid_k(k: int) -> None:
    """Test that k < 1 is rejected."""
    index = Bm25Index.build([("a", "one")])
    with pytest.raises(ValueError, match="positive integer"):
        index.top_k(["one"], k)


def test_build_rejects_duplicate_ids() -> None:
    """Test that doc_ids must be unique."""
    with pytest.raises(ValueError, match="Duplicate doc_id"):
        Bm25Index.build([("a", "one"), ("a", "two")])


def test_score_unknown_doc() -> None:
    """Test that scoring an unknown document raises KeyError."""
    index = Bm25Index.build([("a", "one")])
    with pytest.raises(KeyError):
        index.score(["one"], "missing")


@pytest.mark.parametrize(("k1", "b"), [(0.0, 0.75), (1.2, 1.5), (1.2, -0.1)])
def test_invalid_parameters(k1: float, b: float) -> None:
    """Test parameter validation."""
    with pytest.raises(ValueError, match="must be"):
        Bm25Index.build([("a", "one")], k1=k1, b=b)


def test_save_and_load(tmp_path: Path) -> None:
    """Test that a reloaded index ranks exactly like the original."""
    corpus = _random_corpus(40)
    index = Bm25Index.build(((doc_id, " ".join(terms)) for doc_id, terms in corpus.items()), k1=1.5, b=0.5)
    path = index.save(tmp_path / "index.jsonl")
    loaded = Bm25Index.load(path)
    assert (loaded.k1, loaded.b) == (1.5, 0.5)
    query = ["w1", "w2", "w3"]
    assert loaded.top_k(query, 10) == index.top_k(query, 10)


def test_load_rejects_foreign_file(tmp_path: Path) -> None:
    """Test that a file without the index header is rejected."""
    path = tmp_path / "other.jsonl"
    path.write_text('{"format": "something-else", "version": 1}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="not a relevatr-bm25"):
        Bm25Index.load(path)
