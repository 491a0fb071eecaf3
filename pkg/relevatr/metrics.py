# Copyright (c) 2026 The relevatr authors
"""Confusion matrices and accuracy, precision, recall and F1 of verdicts against gold labels."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .datasets import GoldLabel
from .exceptions import KeyMismatchError
from .judging import JudgeVerdict


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)


class Metric(str, Enum):
    """Binary classification metric."""

    ACCURACY = "accuracy"
    PRECISION = "precision"
    RECALL = "recall"
    F1 = "f1"


METRICS = tuple(Metric)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts of a binary classification, plus the pairs left out for lack of a gold label."""

    tp: int
    fp: int
    tn: int
    fn: int
    excluded: int = 0

    def __post_init__(self) -> None:
        """Check that all counts are non-negative."""
        if min(self.tp, self.fp, self.tn, self.fn, self.excluded) < 0:
            msg = f"Confusion counts must be >= 0, got {self}."
            raise ValueError(msg)

    @property
    def total(self) -> int:
        """Number of scored pairs."""
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict[str, int]:
        """Serialize to a JSON-ready dict."""
        return asdict(self)


@dataclass(frozen=True)
class ScoredPairs:
    """Aligned prediction and gold vectors (True = relevant) over sorted keys."""

    keys: tuple[tuple[str, str], ...]
    predicted: np.ndarray
    gold: np.ndarray
    excluded: int = 0

    def __len__(self) -> int:
        """Number of scored pairs."""
        return len(self.keys)


def scored_pairs(verdicts: Iterable[JudgeVerdict], gold: Mapping[tuple[str, str], GoldLabel | str]) -> ScoredPairs:
    """
    Align verdicts with their gold labels, dropping unlabeled pairs.

    Args:
        verdicts (Iterable[JudgeVerdict]): Verdicts to score.
        gold (Mapping): Gold label per (instance_id, doc_id).

    Returns:
        ScoredPairs: Boolean vectors sorted by key, and the number of excluded unlabeled pairs.

    Raises:
        KeyMismatchError: If a verdict has no gold entry.

    """
    rows = []
    excluded = 0
    for verdict in verdicts:
        label = gold.get(verdict.key)
        if label is None:
            msg = f"No gold label for verdict {verdict.key}."
            raise KeyMismatchError(msg)
        label = GoldLabel(label)
        if label is GoldLabel.UNLABELED:
            excluded += 1
            continue
        rows.append((verdict.key, verdict.predicted is GoldLabel.RELEVANT, label is GoldLabel.RELEVANT))
    rows.sort()
    return ScoredPairs(
        keys=tuple(row[0] for row in rows),
        predicted=np.array([row[1] for row in rows], dtype=bool),
        gold=np.array([row[2] for row in rows], dtype=bool),
        excluded=excluded,
    )


def confusion_from_arrays(predicted: np.ndarray, gold: np.ndarray, excluded: int = 0) -> ConfusionMatrix:
    """Confusion matrix of two aligned boolean vectors."""
    predicted = np.asarray(predicted, dtype=bool)
    gold = np.asarray(gold, dtype=bool)
    return ConfusionMatrix(
        tp=int(np.sum(predicted & gold)),
        fp=int(np.sum(predicted & ~gold)),
        tn=int(np.sum(~predicted & ~gold)),
        fn=int(np.sum(~predicted & gold)),
        excluded=excluded,
    )


def confusion(verdicts: Iterable[JudgeVerdict], gold: Mapping[tuple[str, str], GoldLabel | str]) -> ConfusionMatrix:
    """
    Count verdicts against gold labels.

    Pairs whose gold label is unlabeled (for example BM25 distractors) are not scored and are counted in `excluded`.

    Args:
        verdicts (Iterable[JudgeVerdict]): Verdicts to score.
        gold (Mapping): Gold label per (instance_id, doc_id).

    Returns:
        ConfusionMatrix: The counts.

    Raises:
        KeyMismatchError: If a verdict has no gold entry.

    """
    pairs = scored_pairs(verdicts, gold)
    return confusion_from_arrays(pairs.predicted, pairs.gold, pairs.excluded)


def _safe_divide(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    numerator = np.asarray(numerator, dtype=np.float64)
    denominator = np.asarray(denominator, dtype=np.float64)
    out = np.zeros(np.broadcast(numerator, denominator).shape)
    return np.divide(numerator, denominator, out=out, where=denominator != 0)


def metric_from_counts(
    tp: np.ndarray, fp: np.ndarray, tn: np.ndarray, fn: np.ndarray, which: Metric | str
) -> np.ndarray:
    """
    Vectorized metric over arrays of confusion counts. Any 0/0 yields 0.

    Args:
        tp (np.ndarray): True positives.
        fp (np.ndarray): False positives.
        tn (np.ndarray): True negatives.
        fn (np.ndarray): False negatives.
        which (Metric | str): The metric.

    Returns:
        np.ndarray: Metric values in [0, 1].

    """
    which = Metric(which)
    if which is Metric.ACCURACY:
        return _safe_divide(np.add(tp, tn), np.add(np.add(tp, fp), np.add(tn, fn)))
    precision = _safe_divide(tp, np.add(tp, fp))
    recall = _safe_divide(tp, np.add(tp, fn))
    if which is Metric.PRECISION:
        return precision
    if which is Metric.RECALL:
        return recall
    return _safe_divide(2 * precision * recall, precision + recall)


def metric_from_arrays(predicted: np.ndarray, gold: np.ndarray, which: Metric | str) -> np.ndarray:
    """
    Metric of boolean prediction rows against gold rows, along the last axis.

    Args:
        predicted (np.ndarray): Predictions, shape (..., n).
        gold (np.ndarray): Gold labels broadcastable to predicted.
        which (Metric | str): The metric.

    Returns:
        np.ndarray: One value per row.

    """
    tp = np.sum(predicted & gold, axis=-1)
    fp = np.sum(predicted & ~gold, axis=-1)
    tn = np.sum(~predicted & ~gold, axis=-1)
    fn = np.sum(~predicted & gold, axis=-1)
    return metric_from_counts(tp, fp, tn, fn, which)


def metric(cm: ConfusionMatrix, which: Metric | str) -> float:
    """
    Compute a metric from a confusion matrix.

    accuracy = (tp + tn) / total, precision = tp / (tp + fp), recall = tp / (tp + fn) and f1 = 2PR / (P + R).
    Any 0/0 yields 0; see metric_flags().

    Args:
        cm (ConfusionMatrix): The counts.
        which (Metric | str): accuracy, precision, recall or f1.

    Returns:
        float: The value in [0, 1].

    Examples:
    >>> metric(ConfusionMatrix(tp=1, fp=1, tn=1, fn=1), "f1")
    0.5

    """
    return float(metric_from_counts(cm.tp, cm.fp, cm.tn, cm.fn, which))


def metric_flags(cm: ConfusionMatrix) -> list[str]:
    """Names of the metrics that hit the 0/0 convention, as '<metric>_zero_division'."""
    flags = []
    if cm.total == 0:
        flags.append(f"{Metric.ACCURACY.value}_zero_division")
    if cm.tp + cm.fp == 0:
        flags.append(f"{Metric.PRECISION.value}_zero_division")
    if cm.tp + cm.fn == 0:
        flags.append(f"{Metric.RECALL.value}_zero_division")
    if metric(cm, Metric.PRECISION) + metric(cm, Metric.RECALL) == 0:
        flags.append(f"{Metric.F1.value}_zero_division")
    return flags
