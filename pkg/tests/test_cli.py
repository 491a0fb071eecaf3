# Copyright (c) 2026 The relevatr authors
"""End-to-end tests of the command line."""

import json
import shutil
from collections.abc import Iterator
from pathlib import Path
from unittest.mock import patch

import pytest

from relevatr.cli import EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, EXIT_OK, EXIT_TRANSPORT_ERROR, main
from relevatr.datasets import Source, write_instances
from relevatr.exceptions import AuthenticationError
from relevatr.judging import read_verdicts
from relevatr.prompts import template_digests
from relevatr.transport import CompletionRequest, ScriptedBackend

from .conftest import hotpot_record, make_instance


def _oracle_response(request: CompletionRequest) -> str:
    """Say RELEVANT exactly for the two supporting paragraphs of a direct prompt."""
    return "RELEVANT" if "of 0." in request.prompt or "of 1." in request.prompt else "NOT_RELEVANT"


@pytest.fixture
def dataset(tmp_path: Path) -> Path:
    """
    Fixture writing a HotPotQA file with 10 records per (level, type).

    Returns:
        Path: The dataset file.

    """
    records = [
        hotpot_record(f"{level}-{qtype}-{i}", level, qtype)
        for level in ("easy", "medium", "hard")
        for qtype in ("bridge", "comparison")
        for i in range(10)
    ]
    path = tmp_path / "hotpot.jsonl"
    path.write_text("".join(json.dumps(record) + "\n" for record in records), encoding="utf-8")
    return path


@pytest.fixture
def prepared(dataset: Path, workdir: Path) -> Path:
    """
    Fixture running prepare with 4 pairs per cell.

    Returns:
        Path: The prepared directory.

    """
    args = ["prepare", "--source", "hotpotqa", "--input", str(dataset), "--workdir", str(workdir), "--per-cell", "4"]
    assert main(args) == EXIT_OK
    (path,) = workdir.glob("prepare-*")
    return path


@pytest.fixture
def scripted_backend() -> Iterator[ScriptedBackend]:
    """
    Fixture replacing the HTTP backends with a scripted one.

    Yields:
        Iterator[ScriptedBackend]: The backend handed to every live or recording client.

    """
    backend = ScriptedBackend(responses=_oracle_response)
    with patch("relevatr.cli.make_backend", return_value=backend):
        yield backend


def _run(prepared: Path, *extra: str) -> int:
    return main(["run", "--prepared", str(prepared), "--model", "test-model", *extra])


def _run_dir(prepared: Path, label: str) -> Path:
    (path,) = (prepared / "runs").glob(f"{label}-*")
    return path


# Test cases for prepare


def test_prepare_writes_sample(prepared: Path) -> None:
    """Test the prepared directory layout and the sample size."""
    assert {path.name for path in prepared.iterdir()} == {"instances.jsonl", "sample.jsonl", "manifest.json"}
    sample = prepared.joinpath("sample.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(sample) == 48  # noqa: PLR2004
    manifest = json.loads(prepared.joinpath("manifest.json").read_text(encoding="utf-8"))
    assert manifest["sampling"]["seed"] == 7  # noqa: PLR2004
    assert manifest["execution"]["load_report"]["loaded"] == 60  # noqa: PLR2004
    drawn = manifest["sampling"]["drawn"]
    assert len(drawn) == 12  # noqa: PLR2004
    assert set(drawn.values()) == {4}


def test_prepare_is_deterministic(dataset: Path, tmp_path: Path) -> None:
    """Test that two prepares of the same input and seed write identical files to the same folder."""
    outputs = []
    for name in ("a", "b"):
        args = ["prepare", "--source", "hotpotqa", "--input", str(dataset), "--workdir", str(tmp_path / name)]
        assert main([*args, "--per-cell", "4", "--seed", "3"]) == EXIT_OK
        (path,) = (tmp_path / name).glob("prepare-*")
        outputs.append(path)
    assert outputs[0].name == outputs[1].name
    for file in ("instances.jsonl", "sample.jsonl", "manifest.json"):
        assert outputs[0].joinpath(file).read_bytes() == outputs[1].joinpath(file).read_bytes()


def test_prepare_shortfall(dataset: Path, workdir: Path) -> None:
    """Test that an unsatisfiable plan is an input error."""
    args = ["prepare", "--source", "hotpotqa", "--input", str(dataset), "--workdir", str(workdir)]
    assert main(args) == EXIT_INPUT_ERROR


def test_config_file_sets_defaults(dataset: Path, workdir: Path, tmp_path: Path) -> None:
    """Test that --config supplies option defaults per subcommand."""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"prepare": {"per_cell": 2, "source": "hotpotqa"}}), encoding="utf-8")
    args = ["prepare", "--config", str(config), "--input", str(dataset), "--workdir", str(workdir)]
    assert main(args) == EXIT_OK
    (path,) = workdir.glob("prepare-*")
    assert len(path.joinpath("sample.jsonl").read_text(encoding="utf-8").splitlines()) == 24  # noqa: PLR2004


def test_config_file_rejects_invalid_choice(dataset: Path, workdir: Path, tmp_path: Path) -> None:
    """Test that a config value outside an option's choices is an input error."""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"prepare": {"source": "bogus"}}), encoding="utf-8")
    args = ["prepare", "--config", str(config), "--input", str(dataset), "--workdir", str(workdir)]
    assert main(args) == EXIT_INPUT_ERROR
    assert not list(workdir.iterdir())


def test_prepare_defaults_to_every_labeled_pair(workdir: Path, tmp_path: Path) -> None:
    """Test that sources without a replication plan sample every labeled pair by default."""
    path = write_instances(
        tmp_path / "custom.jsonl", [make_instance(f"c{i}", source=Source.CUSTOM) for i in range(3)]
    )
    assert main(["prepare", "--source", "custom", "--input", str(path), "--workdir", str(workdir)]) == EXIT_OK
    (prepared,) = workdir.glob("prepare-*")
    assert len(prepared.joinpath("sample.jsonl").read_text(encoding="utf-8").splitlines()) == 30  # noqa: PLR2004
    manifest = json.loads(prepared.joinpath("manifest.json").read_text(encoding="utf-8"))
    assert manifest["sampling"]["plan"] == "labeled"


# Test cases for run, score, compare and report


def test_record_then_replay_is_deterministic(
    prepared: Path, tmp_path: Path, scripted_backend: ScriptedBackend
) -> None:
    """Test that replaying a recorded run makes no call and writes byte-identical verdicts every time."""
    store = tmp_path / "store.jsonl"
    assert _run(prepared, "--strategy", "direct", "--record", str(store)) == EXIT_OK
    run_dir = _run_dir(prepared, "direct")
    recorded = read_verdicts(run_dir / "verdicts.jsonl")
    assert len(recorded) == 48  # noqa: PLR2004
    assert len(scripted_backend.calls) == 48  # noqa: PLR2004

    outputs = []
    with patch("relevatr.cli.make_backend", side_effect=AssertionError("no backend in strict replay")):
        for _ in range(2):
            shutil.rmtree(run_dir)
            assert _run(prepared, "--strategy", "direct", "--replay", str(store)) == EXIT_OK
            assert _run_dir(prepared, "direct") == run_dir
            assert main(["score", "--verdicts", str(run_dir / "verdicts.jsonl")]) == EXIT_OK
            outputs.append([run_dir.joinpath(name).read_bytes() for name in ("verdicts.jsonl", "score.json")])
    assert outputs[0] == outputs[1]
    replayed = read_verdicts(run_dir / "verdicts.jsonl")
    assert [(v.key, v.predicted, v.raw_response) for v in replayed] == [
        (v.key, v.predicted, v.raw_response) for v in recorded
    ]


def test_run_resumes(prepared: Path, scripted_backend: ScriptedBackend) -> None:
    """Test that a rerun only judges pairs without a verdict."""
    assert _run(prepared, "--strategy", "direct") == EXIT_OK
    verdicts_path = _run_dir(prepared, "direct") / "verdicts.jsonl"
    lines = verdicts_path.read_text(encoding="utf-8").splitlines()
    verdicts_path.write_text("\n".join(lines[:40]) + "\n", encoding="utf-8")

    assert _run(prepared, "--strategy", "direct") == EXIT_OK
    assert len(scripted_backend.calls) == 48 + 8  # noqa: PLR2004
    assert len(read_verdicts(verdicts_path)) == 48  # noqa: PLR2004


def test_run_resumes_after_torn_line(prepared: Path, scripted_backend: ScriptedBackend) -> None:
    """Test that a verdict cut off mid-line by a killed run is dropped and judged again."""
    assert _run(prepared, "--strategy", "direct") == EXIT_OK
    run_dir = _run_dir(prepared, "direct")
    verdicts_path = run_dir / "verdicts.jsonl"
    lines = verdicts_path.read_text(encoding="utf-8").splitlines(keepends=True)
    verdicts_path.write_text("".join(lines[:-1]) + lines[-1][:25], encoding="utf-8")

    assert _run(prepared, "--strategy", "direct") == EXIT_OK
    assert len(scripted_backend.calls) == 48 + 1  # noqa: PLR2004
    assert len(read_verdicts(verdicts_path)) == 48  # noqa: PLR2004
    assert main(["score", "--verdicts", str(verdicts_path)]) == EXIT_OK
    assert json.loads(run_dir.joinpath("manifest.json").read_text(encoding="utf-8"))["templates"] == template_digests()


@pytest.mark.usefixtures("scripted_backend")
def test_full_pipeline(prepared: Path, tmp_path: Path) -> None:
    """Test run, score, compare, report and import-verdicts end to end."""
    assert _run(prepared, "--strategy", "direct") == EXIT_OK
    assert _run(prepared, "--strategy", "care", "--n", "10") == EXIT_OK
    assert _run(prepared, "--strategy", "indirect") == EXIT_OK
    direct = _run_dir(prepared, "direct") / "verdicts.jsonl"
    care = _run_dir(prepared, "care10") / "verdicts.jsonl"
    assert (_run_dir(prepared, "indirect") / "review.jsonl").exists()

    assert main(["score", "--verdicts", str(direct)]) == EXIT_OK
    score = json.loads(direct.with_name("score.json").read_text(encoding="utf-8"))
    assert score["metrics"]["accuracy"] == 1.0
    assert score["confusion"] == {"tp": 24, "fp": 0, "tn": 24, "fn": 0, "excluded": 0}
    score_files = [direct.with_name("score.json"), direct.with_name("score.manifest.json")]
    first_score = [path.read_bytes() for path in score_files]
    assert main(["score", "--verdicts", str(direct)]) == EXIT_OK
    assert [path.read_bytes() for path in score_files] == first_score

    compare_args = ["compare", "--a", str(direct), "--b", str(care), "--perms", "99"]
    assert main(compare_args) == EXIT_OK
    (default_comparison,) = direct.parent.glob("compare-*.jsonl")
    compare_files = [default_comparison, default_comparison.with_name(f"{default_comparison.stem}.manifest.json")]
    first_compare = [path.read_bytes() for path in compare_files]
    assert main(compare_args) == EXIT_OK
    assert [path.read_bytes() for path in compare_files] == first_compare

    comparison = tmp_path / "compare.jsonl"
    args = ["compare", "--a", str(direct), "--b", str(care), "--perms", "199", "--out", str(comparison)]
    assert main([*args, "--metric", "accuracy", "--metric", "f1"]) == EXIT_OK
    rows = [json.loads(line) for line in comparison.read_text(encoding="utf-8").splitlines()]
    assert [row["metric"] for row in rows] == ["accuracy", "f1"]
    assert rows[0]["observed_diff"] == pytest.approx(0.5)

    report_args = [
        "report",
        "--verdicts",
        f"direct={direct}",
        "--verdicts",
        f"care10={care}",
        "--baseline",
        "direct",
        "--strata",
        "level,type",
        "--resamples",
        "200",
        "--perms",
        "199",
        "--workdir",
        str(tmp_path / "reports"),
    ]
    assert main(report_args) == EXIT_OK
    (report_dir,) = (tmp_path / "reports").glob("report-*")
    expected = {"report.jsonl", "report.txt", "report.csv", "prompt_lengths.txt", "manifest.json"}
    assert {path.name for path in report_dir.iterdir()} == expected
    first = report_dir.joinpath("report.jsonl").read_bytes()
    assert main(report_args) == EXIT_OK
    assert report_dir.joinpath("report.jsonl").read_bytes() == first
    assert len(first.splitlines()) == 1 + 2 * 7

    external = tmp_path / "labels.csv"
    external.write_text("instance_id,doc_id,predicted\neasy-bridge-0,p00,yes\n", encoding="utf-8")
    imported = tmp_path / "imported.jsonl"
    args = ["import-verdicts", "--input", str(external), "--out", str(imported), "--strategy", "human"]
    assert main(args) == EXIT_OK
    assert read_verdicts(imported)[0].strategy == "human"


# Test cases for exit codes


def test_missing_options_exit_code(prepared: Path, tmp_path: Path) -> None:
    """Test that missing required options are input errors."""
    assert main(["prepare", "--source", "hotpotqa"]) == EXIT_INPUT_ERROR
    assert main(["run", "--prepared", str(prepared), "--strategy", "direct"]) == EXIT_INPUT_ERROR
    assert main(["score", "--verdicts", str(tmp_path / "verdicts.jsonl")]) == EXIT_INPUT_ERROR


def test_bad_input_exit_codes(prepared: Path, tmp_path: Path) -> None:
    """Test that unreadable inputs and invalid configurations are input errors."""
    empty = tmp_path / "empty.jsonl"
    empty.write_text("not json\n", encoding="utf-8")
    assert main(["prepare", "--source", "hotpotqa", "--input", str(empty)]) == EXIT_INPUT_ERROR
    assert _run(tmp_path, "--strategy", "direct") == EXIT_INPUT_ERROR
    assert _run(prepared, "--strategy", "indirect", "--variant", "cot", "--replay", "x.jsonl") == EXIT_INPUT_ERROR
    assert _run(prepared, "--strategy", "care", "--n", "-1", "--replay", "x.jsonl") == EXIT_INPUT_ERROR


@pytest.mark.usefixtures("scripted_backend")
@pytest.mark.parametrize("line", ["{broken", '{"instance_id": "easy-bridge-0"}', "[1, 2]"])
def test_malformed_verdicts_exit_code(prepared: Path, line: str) -> None:
    """Test that scoring, comparing or reporting a damaged verdict file is an input error."""
    assert _run(prepared, "--strategy", "direct") == EXIT_OK
    verdicts = _run_dir(prepared, "direct") / "verdicts.jsonl"
    clean = str(verdicts.with_name("clean.jsonl"))
    shutil.copy(verdicts, clean)
    with verdicts.open("a", encoding="utf-8") as file:
        file.write(line + "\n")

    assert main(["score", "--verdicts", str(verdicts)]) == EXIT_INPUT_ERROR
    assert main(["compare", "--a", clean, "--b", str(verdicts), "--perms", "9"]) == EXIT_INPUT_ERROR
    report_args = ["report", "--verdicts", f"a={verdicts}", "--prepared", str(prepared), "--workdir", str(prepared)]
    assert main(report_args) == EXIT_INPUT_ERROR


def test_malformed_sample_exit_code(prepared: Path) -> None:
    """Test that a damaged sample file in the prepared directory is an input error."""
    prepared.joinpath("sample.jsonl").write_text('{"instance_id": "easy-bridge-0"}\n', encoding="utf-8")
    assert _run(prepared, "--strategy", "direct", "--replay", "x.jsonl") == EXIT_INPUT_ERROR


def test_cache_miss_exit_code(prepared: Path, tmp_path: Path) -> None:
    """Test that a strict replay miss is a transport error."""
    assert _run(prepared, "--strategy", "direct", "--replay", str(tmp_path / "empty.jsonl")) == EXIT_TRANSPORT_ERROR


def test_authentication_exit_code(prepared: Path) -> None:
    """Test that a rejected credential is a transport error."""

    def refuse(_: CompletionRequest) -> str:
        msg = "bad key"
        raise AuthenticationError(msg)

    with patch("relevatr.cli.make_backend", return_value=ScriptedBackend(responses=refuse)):
        assert _run(prepared, "--strategy", "direct") == EXIT_TRANSPORT_ERROR


def test_unparseable_error_policy_exit_code(prepared: Path) -> None:
    """Test that an unparseable verdict under the error policy is an internal error."""
    with patch("relevatr.cli.make_backend", return_value=ScriptedBackend(default="perhaps")):
        args = ["--strategy", "direct", "--unparseable", "retry_once_then_error"]
        assert _run(prepared, *args) == EXIT_INTERNAL_ERROR
