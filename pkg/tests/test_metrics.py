# Copyright (c) 2026 The relevatr authors
"""Tests for confusion matrices and classification metrics."""

import numpy as np
import pytest

from relevatr.datasets import GoldLabel
from relevatr.exceptions import KeyMismatchError
from relevatr.judging import JudgeVerdict
from relevatr.metrics import (
    ConfusionMatrix,
    Metric,
    confusion,
    confusion_from_arrays,
    metric,
    metric_flags,
    metric_from_arrays,
    scored_pairs,
)


rng = np.random.default_rng(1234)


def _reference(predicted: list[bool], gold: list[bool]) -> dict[str, float]:
    """Metrics computed one pair at a time with plain floats."""
    tp = fp = tn = fn = 0
    for p, g in zip(predicted, gold, strict=True):
        if p and g:
            tp += 1
        elif p:
            fp += 1
        elif g:
            fn += 1
        else:
            tn += 1
    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": accuracy, "precision": precision, "recall": recall, "f1": f1}


def _verdict(instance_id: str, doc_id: str, predicted: GoldLabel) -> JudgeVerdict:
    return JudgeVerdict(instance_id, doc_id, "direct", "m", predicted, raw_response="")


# Test cases for metric


def test_metrics_match_reference() -> None:
    """Test all four metrics on 1,000 random label sets against a pair-by-pair computation, exactly."""
    for _ in range(1000):
        n = int(rng.integers(1, 51))
        predicted = rng.random(n) < rng.random()
        gold = rng.random(n) < rng.random()
        cm = confusion_from_arrays(predicted, gold)
        expected = _reference(predicted.tolist(), gold.tolist())
        for which in Metric:
            assert metric(cm, which) == expected[which.value]
            assert float(metric_from_arrays(predicted, gold, which)) == expected[which.value]


@pytest.mark.parametrize(
    ("cm", "expected"),
    [
        (ConfusionMatrix(tp=1, fp=1, tn=1, fn=1), {"accuracy": 0.5, "precision": 0.5, "recall": 0.5, "f1": 0.5}),
        (ConfusionMatrix(tp=3, fp=1, tn=0, fn=0), {"accuracy": 0.75, "precision": 0.75, "recall": 1.0, "f1": 6 / 7}),
        (ConfusionMatrix(tp=0, fp=0, tn=5, fn=0), {"accuracy": 1.0, "precision": 0.0, "recall": 0.0, "f1": 0.0}),
        (ConfusionMatrix(tp=0, fp=0, tn=0, fn=0), {"accuracy": 0.0, "precision": 0.0, "recall": 0.0, "f1": 0.0}),
    ],
)
def test_metric_values(cm: ConfusionMatrix, expected: dict[str, float]) -> None:
    """Test hand-computed values, including the 0/0 convention."""
    for name, value in expected.items():
        assert metric(cm, name) == pytest.approx(value)


def test_metric_flags() -> None:
    """Test that 0/0 cases are flagged."""
    assert metric_flags(ConfusionMatrix(tp=1, fp=1, tn=1, fn=1)) == []
    assert metric_flags(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0)) == [
        "precision_zero_division",
        "recall_zero_division",
        "f1_zero_division",
    ]
    assert "accuracy_zero_division" in metric_flags(ConfusionMatrix(0, 0, 0, 0))


def test_vectorized_rows() -> None:
    """Test that metric_from_arrays computes one value per row."""
    predicted = rng.random((7, 20)) < 0.5  # noqa: PLR2004
    gold = rng.random(20) < 0.5  # noqa: PLR2004
    values = metric_from_arrays(predicted, gold, "f1")
    assert values.shape == (7,)
    for row, value in zip(predicted, values, strict=True):
        assert value == _reference(row.tolist(), gold.tolist())["f1"]


def test_confusion_matrix_validation() -> None:
    """Test that negative counts are rejected."""
    with pytest.raises(ValueError, match=">= 0"):
        ConfusionMatrix(tp=-1, fp=0, tn=0, fn=0)


# Test cases for confusion


def test_confusion_excludes_unlabeled_pairs() -> None:
    """Test that unlabeled pairs are excluded and counted."""
    gold = {
        ("a", "p0"): GoldLabel.RELEVANT,
        ("a", "p1"): GoldLabel.NON_RELEVANT,
        ("a", "p2"): GoldLabel.UNLABELED,
        ("b", "p0"): "relevant",
    }
    verdicts = [
        _verdict("a", "p0", GoldLabel.RELEVANT),
        _verdict("a", "p1", GoldLabel.RELEVANT),
        _verdict("a", "p2", GoldLabel.RELEVANT),
        _verdict("b", "p0", GoldLabel.NON_RELEVANT),
    ]
    assert confusion(verdicts, gold) == ConfusionMatrix(tp=1, fp=1, tn=0, fn=1, excluded=1)

    pairs = scored_pairs(reversed(verdicts), gold)
    assert pairs.keys == (("a", "p0"), ("a", "p1"), ("b", "p0"))
    assert pairs.predicted.tolist() == [True, True, False]
    assert pairs.gold.tolist() == [True, False, True]
    assert len(pairs) == 3  # noqa: PLR2004


def test_confusion_requires_gold() -> None:
    """Test that a verdict without a gold label is an error."""
    with pytest.raises(KeyMismatchError, match="No gold label"):
        confusion([_verdict("a", "p0", GoldLabel.RELEVANT)], {})
