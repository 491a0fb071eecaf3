# Copyright (c) 2026 The relevatr authors
"""Seeded percentile bootstrap intervals and paired permutation tests."""

import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, NamedTuple

import numpy as np

from . import settings
from .datasets import GoldLabel
from .exceptions import KeyMismatchError
from .judging import JudgeVerdict, verdict_index
from .metrics import Metric, metric_from_arrays, scored_pairs


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

ROUNDS_PER_CHUNK = 1000
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BootstrapConfig:
    """
    Bootstrap settings.

    resample_size defaults to the number of scored pairs. Unset resamples, alpha and seed fall back to
    relevatr.settings.
    """

    resamples: int | None = None
    resample_size: int | None = None
    alpha: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        """Resolve defaults and validate."""
        if self.resamples is None:
            object.__setattr__(self, "resamples", settings.bootstrap_resamples)
        if self.alpha is None:
            object.__setattr__(self, "alpha", settings.alpha)
        if self.seed is None:
            object.__setattr__(self, "seed", settings.seed)
        if self.resamples < 1:
            msg = f"resamples must be >= 1, got {self.resamples}."
            raise ValueError(msg)
        if self.resample_size is not None and self.resample_size < 1:
            msg = f"resample_size must be >= 1, got {self.resample_size}."
            raise ValueError(msg)
        if not 0 < self.alpha < 1:
            msg = f"alpha must be in (0, 1), got {self.alpha}."
            raise ValueError(msg)

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return asdict(self)


class BootstrapInterval(NamedTuple):
    """Percentile interval and the full-sample point estimate."""

    lo: float
    hi: float
    point: float

    @property
    def half_width(self) -> float:
        """Half the interval width, the '±' of a table."""
        return (self.hi - self.lo) / 2


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of a paired permutation test between two verdict sets."""

    metric: str
    observed_diff: float
    p_value: float
    permutations: int
    significant: bool
    alpha: float = 0.05
    n: int = 0

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ComparisonResult":
        """Deserialize from to_dict() output."""
        return cls(**data)


def _as_arrays(pairs: Sequence[tuple[bool, bool]] | tuple[np.ndarray, np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(pairs, tuple) and len(pairs) == 2 and isinstance(pairs[0], np.ndarray):  # noqa: PLR2004
        return np.asarray(pairs[0], dtype=bool), np.asarray(pairs[1], dtype=bool)
    matrix = np.asarray(pairs, dtype=bool).reshape(-1, 2)
    return matrix[:, 0].copy(), matrix[:, 1].copy()


def _chunked(
    rounds: int, seed: int, draw: Callable[[np.random.Generator, int], np.ndarray], workers: int = 1
) -> np.ndarray:
    """
    Run `rounds` random rounds in fixed-size chunks, each with its own seed derived from `seed`.

    The result depends only on (rounds, seed), never on the worker count or completion order.
    """
    sizes = [ROUNDS_PER_CHUNK] * (rounds // ROUNDS_PER_CHUNK)
    if rounds % ROUNDS_PER_CHUNK:
        sizes.append(rounds % ROUNDS_PER_CHUNK)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def _run(job: tuple[np.random.SeedSequence, int]) -> np.ndarray:
        child, size = job
        return draw(np.random.default_rng(child), size)

    jobs = list(zip(children, sizes, strict=True))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run, jobs))
    else:
        parts = [_run(job) for job in jobs]
    return np.concatenate(parts) if parts else np.empty(0)


def bootstrap_ci(
    pairs: Sequence[tuple[bool, bool]] | tuple[np.ndarray, np.ndarray],
    metric: Metric | str,
    cfg: BootstrapConfig | None = None,
    *,
    workers: int = 1,
) -> BootstrapInterval:
    """
    Percentile bootstrap confidence interval of a metric.

    Args:
        pairs (Sequence[tuple[bool, bool]] | tuple[np.ndarray, np.ndarray]): (predicted, gold) pairs with True for
            relevant, or the two aligned boolean vectors.
        metric (Metric | str): The metric.
        cfg (BootstrapConfig, optional): Resampling settings, by default BootstrapConfig().
        workers (int, optional): Threads used for resampling. Does not change the result. Default 1.

    Returns:
        BootstrapInterval: (lo, hi, point) where lo and hi are the alpha/2 and 1 - alpha/2 percentiles of the
            resampled metric and point is the metric on all pairs.

    Raises:
        ValueError: If pairs is empty.

    Examples:
    >>> bootstrap_ci([(True, True)] * 10, "accuracy")
    BootstrapInterval(lo=1.0, hi=1.0, point=1.0)

    """
    cfg = cfg or BootstrapConfig()
    predicted, gold = _as_arrays(pairs)
    n = len(predicted)
    if n == 0:
        msg = "Cannot bootstrap an empty set of pairs."
        raise ValueError(msg)
    size = cfg.resample_size or n

    def _draw(rng: np.random.Generator, rounds: int) -> np.ndarray:
        index = rng.integers(0, n, size=(rounds, size))
        return metric_from_arrays(predicted[index], gold[index], metric)

    values = _chunked(cfg.resamples, cfg.seed, _draw, workers)
    lo, hi = np.quantile(values, [cfg.alpha / 2, 1 - cfg.alpha / 2])
    point = float(metric_from_arrays(predicted, gold, metric))
    return BootstrapInterval(lo=float(lo), hi=float(hi), point=point)


def paired_permutation_test(
    predicted_a: np.ndarray,
    predicted_b: np.ndarray,
    gold: np.ndarray,
    metric: Metric | str,
    permutations: int | None = None,
    seed: int | None = None,
    alpha: float | None = None,
    *,
    workers: int = 1,
) -> ComparisonResult:
    """
    Two-sided paired permutation test on aligned prediction vectors.

    Every round swaps the two predictions of each item independently with probability 1/2. The p-value is
    (1 + #{|permuted diff| >= |observed diff|}) / (permutations + 1), so it is never 0.

    Args:
        predicted_a (np.ndarray): Predictions of judge A, True for relevant.
        predicted_b (np.ndarray): Predictions of judge B on the same items.
        gold (np.ndarray): Gold labels of the items.
        metric (Metric | str): The compared metric.
        permutations (int, optional): Number of rounds, by default settings.permutations.
        seed (int, optional): Seed, by default settings.seed.
        alpha (float, optional): Significance level, by default settings.alpha.
        workers (int, optional): Threads used for the rounds. Does not change the result. Default 1.

    Returns:
        ComparisonResult: observed_diff = metric(A) - metric(B), the p-value and p < alpha.

    """
    permutations = settings.permutations if permutations is None else permutations
    seed = settings.seed if seed is None else seed
    alpha = settings.alpha if alpha is None else alpha
    if permutations < 1:
        msg = f"permutations must be >= 1, got {permutations}."
        raise ValueError(msg)

    predicted_a = np.asarray(predicted_a, dtype=bool)
    predicted_b = np.asarray(predicted_b, dtype=bool)
    gold = np.asarray(gold, dtype=bool)
    if not predicted_a.shape == predicted_b.shape == gold.shape:
        msg = "Paired vectors must have the same length."
        raise KeyMismatchError(msg)

    observed = float(metric_from_arrays(predicted_a, gold, metric) - metric_from_arrays(predicted_b, gold, metric))

    def _draw(rng: np.random.Generator, rounds: int) -> np.ndarray:
        swap = rng.random((rounds, len(gold))) < 0.5  # noqa: PLR2004
        first = np.where(swap, predicted_b, predicted_a)
        second = np.where(swap, predicted_a, predicted_b)
        return metric_from_arrays(first, gold, metric) - metric_from_arrays(second, gold, metric)

    diffs = _chunked(permutations, seed, _draw, workers)
    extreme = int(np.sum(np.abs(diffs) >= abs(observed) - TIE_TOLERANCE))
    p_value = (1 + extreme) / (permutations + 1)
    return ComparisonResult(
        metric=Metric(metric).value,
        observed_diff=observed,
        p_value=p_value,
        permutations=permutations,
        significant=p_value < alpha,
        alpha=alpha,
        n=len(gold),
    )


def permutation_test(
    a: Iterable[JudgeVerdict],
    b: Iterable[JudgeVerdict],
    gold: Mapping[tuple[str, str], GoldLabel | str],
    metric: Metric | str,
    permutations: int | None = None,
    seed: int | None = None,
    alpha: float | None = None,
    *,
    workers: int = 1,
) -> ComparisonResult:
    """
    Paired permutation test between two verdict sets on identical keys.

    Unlabeled pairs are dropped from both sets before testing.

    Args:
        a (Iterable[JudgeVerdict]): Verdicts of judge A.
        b (Iterable[JudgeVerdict]): Verdicts of judge B.
        gold (Mapping): Gold label per (instance_id, doc_id).
        metric (Metric | str): The compared metric.
        permutations (int, optional): Number of rounds, by default settings.permutations.
        seed (int, optional): Seed, by default settings.seed.
        alpha (float, optional): Significance level, by default settings.alpha.
        workers (int, optional): Threads used for the rounds, default 1.

    Returns:
        ComparisonResult: The test outcome.

    Raises:
        KeyMismatchError: If the key sets differ or a key has no gold label.

    """
    index_a = verdict_index(a)
    index_b = verdict_index(b)
    if index_a.keys() != index_b.keys():
        only_a = len(index_a.keys() - index_b.keys())
        only_b = len(index_b.keys() - index_a.keys())
        msg = f"Verdict sets cover different keys ({only_a} only in A, {only_b} only in B)."
        raise KeyMismatchError(msg)

    pairs_a = scored_pairs(index_a.values(), gold)
    pairs_b = scored_pairs(index_b.values(), gold)
    return paired_permutation_test(
        pairs_a.predicted,
        pairs_b.predicted,
        pairs_a.gold,
        metric,
        permutations,
        seed,
        alpha,
        workers=workers,
    )
