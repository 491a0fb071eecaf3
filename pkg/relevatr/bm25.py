# Copyright (c) 2026 The relevatr authors
"""Okapi BM25 inverted index used to mine distractor contexts."""

import heapq
import logging
import math
import re
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

from . import settings
from .utils import _iter_jsonl, _write_jsonl


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

INDEX_FORMAT = "relevatr-bm25"
INDEX_VERSION = 1

_TOKEN_PATTERN = re.compile(r"[^\W_]+")
_STOPWORDS = frozenset(
    "a an and are as at be by for from has have he in is it its of on or she that the their they this to was were "
    "which who will with".split()
)
_SUFFIXES = ("ing", "ed", "es", "s")
_MIN_STEM_LEN = 3


def _stem(term: str) -> str:
    """Strip one common English suffix, keeping at least three characters."""
    for suffix in _SUFFIXES:
        if term.endswith(suffix) and len(term) - len(suffix) >= _MIN_STEM_LEN:
            return term[: -len(suffix)]
    return term


def tokenize(text: str, *, stemming: bool | None = None, stopwords: bool | None = None) -> list[str]:
    """
    Split text into lowercase alphanumeric terms.

    Args:
        text (str): The text to tokenize.
        stemming (bool, optional): Strip common suffixes, by default settings.bm25_stemming.
        stopwords (bool, optional): Drop English stop words, by default settings.bm25_stopwords.

    Returns:
        list[str]: The terms in text order. Empty input yields an empty list.

    Examples:
    >>> tokenize("NBA games, NBA!")
    ['nba', 'games', 'nba']

    """
    stemming = settings.bm25_stemming if stemming is None else stemming
    stopwords = settings.bm25_stopwords if stopwords is None else stopwords

    terms = _TOKEN_PATTERN.findall(text.lower())
    if stopwords:
        terms = [term for term in terms if term not in _STOPWORDS]
    if stemming:
        terms = [_stem(term) for term in terms]
    return terms


@dataclass
class Bm25Index:
    """An immutable inverted index with Okapi BM25 scoring."""

    doc_count: int
    avg_doc_len: float
    postings: dict[str, list[tuple[str, int]]]
    doc_lens: dict[str, int]
    k1: float = 1.2
    b: float = 0.75
    _tf: dict[str, dict[str, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Validate the parameters and build the term lookup."""
        if self.k1 <= 0:
            msg = f"k1 must be positive, got {self.k1}."
            raise ValueError(msg)
        if not 0 <= self.b <= 1:
            msg = f"b must be between 0 and 1, got {self.b}."
            raise ValueError(msg)
        self._tf = {term: dict(entries) for term, entries in self.postings.items()}

    @classmethod
    def build(
        cls,
        docs: Iterable[tuple[str, str]],
        *,
        k1: float | None = None,
        b: float | None = None,
        stemming: bool | None = None,
        stopwords: bool | None = None,
    ) -> "Bm25Index":
        """
        Build an index from (doc_id, text) pairs.

        Args:
            docs (Iterable[tuple[str, str]]): Documents to index. doc_id values must be unique.
            k1 (float, optional): Saturation parameter, by default settings.bm25_k1.
            b (float, optional): Length normalization, by default settings.bm25_b.
            stemming (bool, optional): Tokenizer stemming, by default settings.bm25_stemming.
            stopwords (bool, optional): Tokenizer stop-word removal, by default settings.bm25_stopwords.

        Returns:
            Bm25Index: The index.

        Raises:
            ValueError: If a doc_id appears twice.

        """
        postings: dict[str, list[tuple[str, int]]] = {}
        doc_lens: dict[str, int] = {}
        for doc_id, text in docs:
            if doc_id in doc_lens:
                msg = f"Duplicate doc_id in index: {doc_id}"
                raise ValueError(msg)
            terms = tokenize(text, stemming=stemming, stopwords=stopwords)
            doc_lens[doc_id] = len(terms)
            for term, tf in Counter(terms).items():
                postings.setdefault(term, []).append((doc_id, tf))

        doc_count = len(doc_lens)
        avg_doc_len = sum(doc_lens.values()) / doc_count if doc_count else 0.0
        return cls(
            doc_count=doc_count,
            avg_doc_len=avg_doc_len,
            postings=postings,
            doc_lens=doc_lens,
            k1=settings.bm25_k1 if k1 is None else k1,
            b=settings.bm25_b if b is None else b,
        )

    def idf(self, term: str) -> float:
        """Non-negative inverse document frequency: ln(1 + (N - df + 0.5) / (df + 0.5))."""
        df = len(self.postings.get(term, ()))
        return math.log(1 + (self.doc_count - df + 0.5) / (df + 0.5))

    def _length_norm(self, doc_id: str) -> float:
        if self.avg_doc_len == 0:
            return self.k1
        return self.k1 * (1 - self.b + self.b * self.doc_lens[doc_id] / self.avg_doc_len)

    def score(self, query_terms: list[str], doc_id: str) -> float:
        """
        Score one document against a query.

        Args:
            query_terms (list[str]): Tokenized query. Repeated terms contribute once per occurrence.
            doc_id (str): The document to score.

        Returns:
            float: The BM25 score, always >= 0.

        Raises:
            KeyError: If doc_id is not in the index.

        """
        if doc_id not in self.doc_lens:
            msg = f"Unknown doc_id: {doc_id}"
            raise KeyError(msg)

        norm = self._length_norm(doc_id)
        total = 0.0
        for term in query_terms:
            tf = self._tf.get(term, {}).get(doc_id, 0)
            if tf:
                total += self.idf(term) * tf * (self.k1 + 1) / (tf + norm)
        return total

    def top_k(self, query_terms: list[str], k: int, exclude: set[str] | None = None) -> list[tuple[str, float]]:
        """
        Rank the documents for a query.

        Args:
            query_terms (list[str]): Tokenized query.
            k (int): Number of documents to return, at least 1.
            exclude (set[str], optional): doc_ids that must not be returned.

        Returns:
            list[tuple[str, float]]: Up to k (doc_id, score) pairs by descending score, ties by ascending doc_id.

        Raises:
            ValueError: If k < 1.

        """
        if k < 1:
            msg = f"k must be a positive integer, got {k}."
            raise ValueError(msg)
        exclude = exclude or set()

        # Term-at-a-time accumulation, in query order so sums match score() exactly.
        scores = dict.fromkeys(self.doc_lens, 0.0)
        for term in query_terms:
            entries = self._tf.get(term)
            if not entries:
                continue
            idf = self.idf(term)
            for doc_id, tf in entries.items():
                scores[doc_id] += idf * tf * (self.k1 + 1) / (tf + self._length_norm(doc_id))

        eligible = ((doc_id, score) for doc_id, score in scores.items() if doc_id not in exclude)
        return heapq.nsmallest(k, eligible, key=lambda item: (-item[1], item[0]))

    def save(self, path: str | Path) -> Path:
        """
        Persist the index as line-delimited JSON: a versioned header, one line per term, one line per document.

        Args:
            path (str | Path): Destination file.

        Returns:
            Path: The written path.

        """
        header = {"format": INDEX_FORMAT, "version": INDEX_VERSION, "k1": self.k1, "b": self.b}
        terms = (
            {"term": term, "df": len(entries), "postings": [list(entry) for entry in entries]}
            for term, entries in sorted(self.postings.items())
        )
        docs = ({"doc": doc_id, "len": length} for doc_id, length in sorted(self.doc_lens.items()))
        return _write_jsonl(path, [header, *terms, *docs])

    @classmethod
    def load(cls, path: str | Path) -> "Bm25Index":
        """
        Load an index written by save().

        Args:
            path (str | Path): Path to the index file.

        Returns:
            Bm25Index: The index.

        Raises:
            ValueError: If the file is not a supported index.

        """
        header: dict | None = None
        postings: dict[str, list[tuple[str, int]]] = {}
        doc_lens: dict[str, int] = {}
        for line_number, record, error in _iter_jsonl(path):
            if record is None:
                msg = f"{path}:{line_number}: {error}"
                raise ValueError(msg)
            if header is None:
                if record.get("format") != INDEX_FORMAT or record.get("version") != INDEX_VERSION:
                    msg = f"{path} is not a {INDEX_FORMAT} v{INDEX_VERSION} index."
                    raise ValueError(msg)
                header = record
            elif "term" in record:
                postings[record["term"]] = [(doc_id, int(tf)) for doc_id, tf in record["postings"]]
            else:
                doc_lens[record["doc"]] = int(record["len"])

        if header is None:
            msg = f"{path} is empty."
            raise ValueError(msg)
        doc_count = len(doc_lens)
        return cls(
            doc_count=doc_count,
            avg_doc_len=sum(doc_lens.values()) / doc_count if doc_count else 0.0,
            postings=postings,
            doc_lens=doc_lens,
            k1=header["k1"],
            b=header["b"],
        )
