# Copyright (c) 2026 The relevatr authors
"""Tests for report building and rendering."""

import csv
import io
import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from relevatr.datasets import EvalInstance, GoldLabel, SamplingPlan, gold_map, stratified_sample
from relevatr.judging import JudgeVerdict
from relevatr.reporting import (
    DELIMITED_COLUMNS,
    OVERALL,
    MetricReport,
    MetricValue,
    OutputFormat,
    build_report,
    emit,
    format_prompt_lengths,
    format_table,
    parse_strata,
    prompt_length_summary,
    read_reports,
    render,
)
from relevatr.stats import BootstrapConfig, BootstrapInterval


rng = np.random.default_rng(1234)

FAST = BootstrapConfig(resamples=200, seed=1)


def _judge(instances: list[EvalInstance], label: str, accuracy: float, prompt_chars: int) -> list[JudgeVerdict]:
    """Synthetic verdicts agreeing with the gold label with the given probability."""
    sample = stratified_sample(instances, SamplingPlan.replication(per_cell=10, seed=4))
    verdicts = []
    for pair in sample:
        correct = rng.random() < accuracy
        relevant = (pair.context.gold_label is GoldLabel.RELEVANT) == correct
        verdicts.append(
            JudgeVerdict(
                pair.instance.instance_id,
                pair.context.doc_id,
                label,
                "model-x",
                GoldLabel.RELEVANT if relevant else GoldLabel.NON_RELEVANT,
                raw_response="",
                prompt_chars=prompt_chars,
            )
        )
    return verdicts


@pytest.fixture
def verdict_sets(hotpot_population: list[EvalInstance]) -> dict[str, list[JudgeVerdict]]:
    """
    Fixture with a weak direct judge and a strong CARE judge on the same 120 pairs.

    Returns:
        dict[str, list[JudgeVerdict]]: Verdicts per label.

    """
    return {
        "direct": _judge(hotpot_population, "direct", 0.6, 1300),
        "care10": _judge(hotpot_population, "care10", 0.95, 6500),
    }


# Test cases for build_report


def test_overall_and_strata(hotpot_population: list[EvalInstance], verdict_sets: dict) -> None:
    """Test one overall row and one row per stratum cell for every set."""
    gold = gold_map(hotpot_population)
    reports = build_report(verdict_sets, gold, hotpot_population, [("level",), ("level", "type")], FAST)
    assert len(reports) == 2 * (1 + 3 + 6)
    assert [report.stratum for report in reports[:2]] == [OVERALL, "level=easy"]
    assert reports[0].strategy == "care10"

    for report in reports:
        assert set(report.metrics) == {"accuracy", "precision", "recall", "f1"}
        for value in report.metrics.values():
            assert value.lo <= value.point <= value.hi

    direct = {report.stratum: report for report in reports if report.strategy == "direct"}
    assert direct[OVERALL].n_scored == 120  # noqa: PLR2004
    assert sum(direct[f"level={level}"].n_scored for level in ("easy", "medium", "hard")) == 120  # noqa: PLR2004
    assert direct["level=hard/type=comparison"].n_scored == 20  # noqa: PLR2004
    assert direct[OVERALL].model_id == "model-x"


def test_baseline_comparisons(hotpot_population: list[EvalInstance], verdict_sets: dict) -> None:
    """Test that non-baseline rows carry a comparison per metric."""
    gold = gold_map(hotpot_population)
    reports = build_report(
        verdict_sets, gold, hotpot_population, stats_cfg=FAST, baseline="direct", permutations=999
    )
    by_label = {report.strategy: report for report in reports}
    assert by_label["direct"].comparisons == {}
    care = by_label["care10"]
    assert care.baseline == "direct"
    assert set(care.comparisons) == {"accuracy", "precision", "recall", "f1"}
    assert care.comparisons["accuracy"].significant
    assert care.comparisons["accuracy"].observed_diff > 0
    assert "*" in format_table(reports)

    with pytest.raises(KeyError, match="Baseline"):
        build_report(verdict_sets, gold, hotpot_population, stats_cfg=FAST, baseline="missing")


def test_empty_strata_are_skipped(hotpot_population: list[EvalInstance], verdict_sets: dict) -> None:
    """Test that strata without scored pairs produce no row."""
    easy = {
        label: [verdict for verdict in verdicts if verdict.instance_id.startswith("easy")]
        for label, verdicts in verdict_sets.items()
    }
    reports = build_report(easy, gold_map(hotpot_population), hotpot_population, [("level",)], FAST)
    assert {report.stratum for report in reports} == {OVERALL, "level=easy"}


def test_interval_missing_point_is_widened(hotpot_population: list[EvalInstance], verdict_sets: dict) -> None:
    """Test that an interval excluding its point estimate is widened and flagged."""
    with patch("relevatr.reporting.bootstrap_ci", return_value=BootstrapInterval(lo=0.1, hi=0.2, point=0.5)):
        reports = build_report(
            {"direct": verdict_sets["direct"]}, gold_map(hotpot_population), hotpot_population, metrics=["f1"]
        )
    assert reports[0].metrics["f1"] == MetricValue(point=0.5, lo=0.1, hi=0.5)
    assert "f1_interval_widened" in reports[0].flags


def test_parse_strata() -> None:
    """Test stratum specifications."""
    assert parse_strata("level,type") == ("level", "type")
    assert parse_strata(" level ") == ("level",)
    with pytest.raises(ValueError, match="Unknown stratum"):
        parse_strata("level,colour")


def test_metric_report_validation() -> None:
    """Test that rows need scored pairs and intervals around their point."""
    with pytest.raises(ValueError, match="no scored pairs"):
        MetricReport("direct", "m", OVERALL, {}, n_scored=0)
    with pytest.raises(ValueError, match="does not contain"):
        MetricReport("direct", "m", OVERALL, {"f1": MetricValue(point=0.9, lo=0.1, hi=0.5)}, n_scored=3)


# Test cases for rendering


@pytest.fixture
def reports(hotpot_population: list[EvalInstance], verdict_sets: dict) -> list[MetricReport]:
    """
    Fixture with report rows including comparisons.

    Returns:
        list[MetricReport]: The rows.

    """
    gold = gold_map(hotpot_population)
    return build_report(
        verdict_sets, gold, hotpot_population, [("type",)], FAST, baseline="direct", permutations=499
    )


def test_structured_output(tmp_path: Path, reports: list[MetricReport]) -> None:
    """Test the versioned header and that rows read back unchanged."""
    path = emit(reports, tmp_path / "out" / "report.jsonl", OutputFormat.STRUCTURED)
    header = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    assert header == {"format": "relevatr-report", "version": 1}
    assert read_reports(path) == reports


def test_delimited_output(reports: list[MetricReport]) -> None:
    """Test one delimited row per (report, metric) with full-precision values."""
    rows = list(csv.reader(io.StringIO(render(reports, "delimited"))))
    assert tuple(rows[0]) == DELIMITED_COLUMNS
    assert len(rows) == 1 + 4 * len(reports)
    first = dict(zip(DELIMITED_COLUMNS, rows[1], strict=True))
    report = reports[0]
    assert float(first["value"]) == report.metrics[first["metric"]].point
    assert first["stratum"] == OVERALL


def test_table_output(reports: list[MetricReport]) -> None:
    """Test the aligned table with rounded values and half-widths."""
    table = render(reports, "table-text")
    lines = table.splitlines()
    assert lines[0].split()[:4] == ["strategy", "model", "stratum", "n"]
    assert set(lines[1]) <= {"-", " "}
    assert len(lines) == 2 + len(reports)
    assert "±" in table


def test_empty_render() -> None:
    """Test that rendering no rows yields the header only."""
    assert render([], "delimited").strip() == ",".join(DELIMITED_COLUMNS)
    assert render([], "structured").count("\n") == 1


def test_read_reports_rejects_other_files(tmp_path: Path) -> None:
    """Test that only structured reports are read."""
    path = tmp_path / "other.jsonl"
    path.write_text('{"format": "relevatr-bm25"}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="not a structured report"):
        read_reports(path)


# Test cases for prompt lengths


def test_prompt_length_summary(verdict_sets: dict) -> None:
    """Test mean and median prompt lengths and the ratio to the reference set."""
    rows = {row.strategy: row for row in prompt_length_summary(verdict_sets)}
    assert rows["direct"].mean == 1300  # noqa: PLR2004
    assert rows["care10"].median == 6500  # noqa: PLR2004
    assert rows["care10"].ratio == pytest.approx(5.0)
    assert rows["direct"].ratio == 1.0
    assert "care10" in format_prompt_lengths(list(rows.values()))

    no_reference = prompt_length_summary({"care10": verdict_sets["care10"]})
    assert no_reference[0].ratio is None
