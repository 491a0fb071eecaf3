# Copyright (c) 2026 The relevatr authors
"""Assemble scored verdict sets into strategy x model x stratum tables and write them out."""

import csv
import io
import itertools
import logging
import statistics
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any

from . import settings
from .datasets import EvalInstance, GoldLabel
from .judging import JudgeVerdict
from .metrics import METRICS, Metric, confusion_from_arrays, metric_flags, scored_pairs
from .stats import BootstrapConfig, ComparisonResult, bootstrap_ci, permutation_test
from .utils import _dumps, _iter_jsonl


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

REPORT_FORMAT = "relevatr-report"
REPORT_VERSION = 1
OVERALL = "overall"
STRATUM_DIMENSIONS = ("level", "type")
DELIMITED_COLUMNS = (
    "strategy",
    "model_id",
    "stratum",
    "metric",
    "value",
    "lo",
    "hi",
    "half_width",
    "n_scored",
    "baseline",
    "p_value",
    "significant",
    "flags",
)


class OutputFormat(str, Enum):
    """Report file format."""

    STRUCTURED = "structured"
    TABLE_TEXT = "table-text"
    DELIMITED = "delimited"


FILE_SUFFIXES = {OutputFormat.STRUCTURED: ".jsonl", OutputFormat.TABLE_TEXT: ".txt", OutputFormat.DELIMITED: ".csv"}


@dataclass(frozen=True)
class MetricValue:
    """Point estimate with its percentile interval."""

    point: float
    lo: float
    hi: float

    @property
    def half_width(self) -> float:
        """Half the interval width."""
        return (self.hi - self.lo) / 2

    def to_dict(self) -> dict[str, float]:
        """Serialize to a JSON-ready dict, half-width included."""
        return {"point": self.point, "lo": self.lo, "hi": self.hi, "half_width": self.half_width}

    @classmethod
    def from_dict(cls, data: dict[str, float]) -> "MetricValue":
        """Deserialize from to_dict() output."""
        return cls(point=data["point"], lo=data["lo"], hi=data["hi"])


@dataclass(frozen=True)
class MetricReport:
    """One table row: a verdict set scored on one stratum."""

    strategy: str
    model_id: str
    stratum: str
    metrics: dict[str, MetricValue]
    n_scored: int
    flags: tuple[str, ...] = ()
    baseline: str | None = None
    comparisons: dict[str, ComparisonResult] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Check lo <= point <= hi and n_scored > 0."""
        if self.n_scored <= 0:
            msg = f"Report row {self.strategy}/{self.stratum} has no scored pairs."
            raise ValueError(msg)
        for name, value in self.metrics.items():
            if not value.lo <= value.point <= value.hi:
                msg = f"Interval of {name} does not contain its point estimate: {value}."
                raise ValueError(msg)
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def sort_key(self) -> tuple[str, str, bool, str]:
        """(strategy, model, stratum) with the overall stratum first."""
        return self.strategy, self.model_id, self.stratum != OVERALL, self.stratum

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {
            "strategy": self.strategy,
            "model_id": self.model_id,
            "stratum": self.stratum,
            "metrics": {name: value.to_dict() for name, value in self.metrics.items()},
            "n_scored": self.n_scored,
            "flags": list(self.flags),
            "baseline": self.baseline,
            "comparisons": {name: result.to_dict() for name, result in self.comparisons.items()},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MetricReport":
        """Deserialize from to_dict() output."""
        return cls(
            strategy=data["strategy"],
            model_id=data["model_id"],
            stratum=data["stratum"],
            metrics={name: MetricValue.from_dict(value) for name, value in data["metrics"].items()},
            n_scored=int(data["n_scored"]),
            flags=tuple(data.get("flags", ())),
            baseline=data.get("baseline"),
            comparisons={
                name: ComparisonResult.from_dict(result) for name, result in data.get("comparisons", {}).items()
            },
        )


def _stratum_values(instance: EvalInstance) -> dict[str, str]:
    return {"level": instance.difficulty.value, "type": instance.qtype.value}


def parse_strata(spec: str) -> tuple[str, ...]:
    """
    Parse a comma-separated grouping such as 'level,type'.

    Raises:
        ValueError: If a dimension is unknown.

    """
    dims = tuple(part.strip() for part in spec.split(",") if part.strip())
    unknown = [dim for dim in dims if dim not in STRATUM_DIMENSIONS]
    if unknown:
        msg = f"Unknown stratum dimension(s) {unknown}. Choose from {', '.join(STRATUM_DIMENSIONS)}."
        raise ValueError(msg)
    return dims


def _stratum_keys(
    instances: Sequence[EvalInstance], dims: Sequence[str], keys: Iterable[tuple[str, str]]
) -> dict[str, set[tuple[str, str]]]:
    """Partition keys into the cells of a grouping, including cells with no keys."""
    by_id = {instance.instance_id: _stratum_values(instance) for instance in instances}
    observed = {dim: sorted({values[dim] for values in by_id.values()}) for dim in dims}
    cells: dict[str, set[tuple[str, str]]] = {
        "/".join(f"{dim}={value}" for dim, value in zip(dims, combo, strict=True)): set()
        for combo in itertools.product(*(observed[dim] for dim in dims))
    }
    for key in keys:
        values = by_id.get(key[0])
        if values is None:
            continue
        cells["/".join(f"{dim}={values[dim]}" for dim in dims)].add(key)
    return cells


def _report_row(
    label: str,
    model_id: str,
    stratum: str,
    verdicts: Sequence[JudgeVerdict],
    gold: Mapping[tuple[str, str], GoldLabel | str],
    stats_cfg: BootstrapConfig,
    metrics: Sequence[Metric],
) -> MetricReport | None:
    pairs = scored_pairs(verdicts, gold)
    if len(pairs) == 0:
        logger.warning("Stratum %s of %s has no scored pairs, skipped.", stratum, label)
        return None

    cm = confusion_from_arrays(pairs.predicted, pairs.gold, pairs.excluded)
    flags = metric_flags(cm)
    values = {}
    for which in metrics:
        interval = bootstrap_ci((pairs.predicted, pairs.gold), which, stats_cfg)
        lo, hi = interval.lo, interval.hi
        if not lo <= interval.point <= hi:
            lo, hi = min(lo, interval.point), max(hi, interval.point)
            flags.append(f"{Metric(which).value}_interval_widened")
        values[Metric(which).value] = MetricValue(point=interval.point, lo=lo, hi=hi)
    return MetricReport(
        strategy=label,
        model_id=model_id,
        stratum=stratum,
        metrics=values,
        n_scored=len(pairs),
        flags=tuple(flags),
    )


def _model_id(verdicts: Sequence[JudgeVerdict]) -> str:
    models = sorted({verdict.model_id for verdict in verdicts})
    return models[0] if len(models) == 1 else "+".join(models)


def build_report(
    verdict_sets: Mapping[str, Sequence[JudgeVerdict]],
    gold: Mapping[tuple[str, str], GoldLabel | str],
    instances: Sequence[EvalInstance],
    strata: Sequence[Sequence[str]] = (),
    stats_cfg: BootstrapConfig | None = None,
    *,
    metrics: Sequence[Metric | str] = METRICS,
    baseline: str | None = None,
    permutations: int | None = None,
) -> list[MetricReport]:
    """
    Score verdict sets per stratum with bootstrap intervals and, optionally, significance against a baseline.

    The overall stratum is always present. Every grouping in `strata` adds one row per cell of the product of its
    dimensions, so ('level', 'type') yields the six level x type cells of a HotPotQA sample. Stratum rows resample
    their own number of pairs. An interval that misses its point estimate is widened to include it and flagged.

    Args:
        verdict_sets (Mapping[str, Sequence[JudgeVerdict]]): Verdicts per run label, e.g. 'direct' or 'care10'.
        gold (Mapping): Gold label per (instance_id, doc_id).
        instances (Sequence[EvalInstance]): Instances providing the stratum attributes.
        strata (Sequence[Sequence[str]], optional): Groupings of 'level' and 'type', by default none.
        stats_cfg (BootstrapConfig, optional): Bootstrap settings, by default BootstrapConfig().
        metrics (Sequence[Metric | str], optional): Reported metrics, by default all four.
        baseline (str, optional): Label of the baseline set. Other sets are compared to it per stratum.
        permutations (int, optional): Permutation rounds, by default settings.permutations.

    Returns:
        list[MetricReport]: Rows sorted by (strategy, model, stratum), overall first.

    Raises:
        KeyError: If baseline is not a key of verdict_sets.
        KeyMismatchError: If a verdict has no gold label, or a compared set and the baseline cover different keys.

    """
    stats_cfg = stats_cfg or BootstrapConfig()
    stratum_cfg = replace(stats_cfg, resample_size=None)
    metrics = [Metric(which) for which in metrics]
    if baseline is not None and baseline not in verdict_sets:
        msg = f"Baseline {baseline!r} is not one of {sorted(verdict_sets)}."
        raise KeyError(msg)

    reports = []
    for label, verdicts in sorted(verdict_sets.items()):
        model_id = _model_id(verdicts)
        by_key = {verdict.key: verdict for verdict in verdicts}
        subsets: list[tuple[str, list[JudgeVerdict], BootstrapConfig]] = [(OVERALL, list(verdicts), stats_cfg)]
        for dims in strata:
            for stratum, keys in _stratum_keys(instances, dims, by_key).items():
                subsets.append((stratum, [by_key[key] for key in sorted(keys)], stratum_cfg))

        for stratum, subset, cfg in subsets:
            row = _report_row(label, model_id, stratum, subset, gold, cfg, metrics)
            if row is None:
                continue
            if baseline is not None and label != baseline:
                row = _attach_significance(
                    row, subset, baseline, verdict_sets[baseline], gold, metrics, stats_cfg, permutations
                )
            reports.append(row)
    return sorted(reports, key=lambda report: report.sort_key)


def _attach_significance(
    row: MetricReport,
    subset: Sequence[JudgeVerdict],
    baseline: str,
    baseline_verdicts: Sequence[JudgeVerdict],
    gold: Mapping[tuple[str, str], GoldLabel | str],
    metrics: Sequence[Metric],
    stats_cfg: BootstrapConfig,
    permutations: int | None,
) -> MetricReport:
    keys = {verdict.key for verdict in subset}
    baseline_subset = [verdict for verdict in baseline_verdicts if verdict.key in keys]
    comparisons = {
        which.value: permutation_test(
            subset, baseline_subset, gold, which, permutations, seed=stats_cfg.seed, alpha=stats_cfg.alpha
        )
        for which in metrics
    }
    return replace(row, comparisons=comparisons, baseline=baseline)


@dataclass(frozen=True)
class PromptLengthRow:
    """Prompt length statistics of one verdict set."""

    strategy: str
    n: int
    mean: float
    median: float
    ratio: float | None

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {"strategy": self.strategy, "n": self.n, "mean": self.mean, "median": self.median, "ratio": self.ratio}


def prompt_length_summary(
    verdict_sets: Mapping[str, Sequence[JudgeVerdict]], reference: str = "direct"
) -> list[PromptLengthRow]:
    """
    Mean and median prompt length per verdict set, with the ratio of means against a reference set.

    Args:
        verdict_sets (Mapping[str, Sequence[JudgeVerdict]]): Verdicts per run label.
        reference (str, optional): Label of the reference set, by default 'direct'. Ratios are None when it is
            absent.

    Returns:
        list[PromptLengthRow]: One row per non-empty set, sorted by label.

    """
    rows = {}
    for label, verdicts in sorted(verdict_sets.items()):
        lengths = [verdict.prompt_chars for verdict in verdicts]
        if not lengths:
            continue
        rows[label] = (len(lengths), statistics.fmean(lengths), float(statistics.median(lengths)))

    reference_mean = rows[reference][1] if reference in rows else None
    return [
        PromptLengthRow(
            strategy=label,
            n=n,
            mean=mean,
            median=median,
            ratio=mean / reference_mean if reference_mean else None,
        )
        for label, (n, mean, median) in rows.items()
    ]


def _align(rows: Sequence[Sequence[str]]) -> str:
    """Left-align columns, with a dashed rule under the first row."""
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(text.ljust(width) for text, width in zip(row, widths, strict=True)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def _cell(value: MetricValue, comparison: ComparisonResult | None, decimals: int) -> str:
    text = f"{value.point:.{decimals}f}±{value.half_width:.{decimals}f}"
    return text + "*" if comparison is not None and comparison.significant else text


def format_table(reports: Sequence[MetricReport], metrics: Sequence[Metric | str] = METRICS) -> str:
    """
    Render reports as an aligned text table. Values are rounded to settings.display_decimals.

    A '*' marks a value significantly different from the row's baseline.
    """
    decimals = settings.display_decimals
    names = [Metric(which).value for which in metrics]
    header = ["strategy", "model", "stratum", "n", *names, "flags"]
    rows = [
        [
            report.strategy,
            report.model_id,
            report.stratum,
            str(report.n_scored),
            *(
                _cell(report.metrics[name], report.comparisons.get(name), decimals) if name in report.metrics else "-"
                for name in names
            ),
            ",".join(report.flags),
        ]
        for report in sorted(reports, key=lambda report: report.sort_key)
    ]
    return _align([header, *rows])


def _delimited_rows(reports: Sequence[MetricReport]) -> Iterable[list[Any]]:
    for report in sorted(reports, key=lambda report: report.sort_key):
        for name, value in report.metrics.items():
            comparison = report.comparisons.get(name)
            yield [
                report.strategy,
                report.model_id,
                report.stratum,
                name,
                repr(value.point),
                repr(value.lo),
                repr(value.hi),
                repr(value.half_width),
                report.n_scored,
                report.baseline or "",
                "" if comparison is None else repr(comparison.p_value),
                "" if comparison is None else str(comparison.significant).lower(),
                ";".join(report.flags),
            ]


def render(reports: Sequence[MetricReport], fmt: OutputFormat | str) -> str:
    """Render reports in one of the three output formats. An empty list yields the header only."""
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.TABLE_TEXT:
        return format_table(reports)
    if fmt is OutputFormat.DELIMITED:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(DELIMITED_COLUMNS)
        writer.writerows(_delimited_rows(reports))
        return buffer.getvalue()
    lines = [_dumps({"format": REPORT_FORMAT, "version": REPORT_VERSION})]
    lines.extend(_dumps(report.to_dict()) for report in sorted(reports, key=lambda report: report.sort_key))
    return "\n".join(lines) + "\n"


def emit(reports: Sequence[MetricReport], path: str | Path, fmt: OutputFormat | str) -> Path:
    """
    Write reports to a file.

    Args:
        reports (Sequence[MetricReport]): Report rows.
        path (str | Path): Destination file. Parent folders are created.
        fmt (OutputFormat | str): structured, table-text or delimited.

    Returns:
        Path: The written path.

    Raises:
        OSError: If the destination is not writable.

    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        file.write(render(reports, fmt))
    return path


def read_reports(path: str | Path) -> list[MetricReport]:
    """
    Read a structured report written by emit().

    Raises:
        ValueError: If the file is not a structured report.

    """
    reports = []
    header_seen = False
    for line_number, record, error in _iter_jsonl(path):
        if record is None:
            msg = f"{path}:{line_number}: {error}"
            raise ValueError(msg)
        if not header_seen:
            if record.get("format") != REPORT_FORMAT:
                msg = f"{path} is not a structured report."
                raise ValueError(msg)
            header_seen = True
            continue
        reports.append(MetricReport.from_dict(record))
    return reports


def format_prompt_lengths(rows: Sequence[PromptLengthRow]) -> str:
    """Render prompt length rows as an aligned text table."""
    decimals = settings.display_decimals
    header = ["strategy", "n", "mean_chars", "median_chars", "ratio"]
    body = [
        [
            row.strategy,
            str(row.n),
            f"{row.mean:.1f}",
            f"{row.median:.1f}",
            "-" if row.ratio is None else f"{row.ratio:.{decimals}f}",
        ]
        for row in rows
    ]
    return _align([header, *body])
