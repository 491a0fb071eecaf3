# Copyright (c) 2026 The relevatr authors
"""Shared fixtures and builders for the relevatr tests."""

from collections.abc import Callable, Iterator, Sequence
from pathlib import Path
from typing import Any

import pytest

from relevatr.datasets import ContextDoc, Difficulty, EvalInstance, GoldLabel, QuestionType, Source
from relevatr.transport import CompletionClient, ScriptedBackend


LEVELS = (Difficulty.EASY, Difficulty.MEDIUM, Difficulty.HARD)
TYPES = (QuestionType.BRIDGE, QuestionType.COMPARISON)


def make_instance(
    instance_id: str,
    level: Difficulty | str = Difficulty.EASY,
    qtype: QuestionType | str = QuestionType.BRIDGE,
    *,
    n_contexts: int = 10,
    relevant: Sequence[int] = (0, 1),
    answer: str | None = "Paris",
    source: Source | str = Source.HOTPOTQA,
    text: Callable[[int], str] | None = None,
) -> EvalInstance:
    """
    Build a labeled instance with `n_contexts` titled contexts p00, p01, ...

    Returns:
        EvalInstance: The instance, relevant at the given positions.

    """
    contexts = tuple(
        ContextDoc(
            doc_id=f"p{position:02d}",
            title=f"Title {instance_id} {position}",
            text=text(position) if text else f"Passage {position} about question {instance_id}.",
            gold_label=GoldLabel.RELEVANT if position in relevant else GoldLabel.NON_RELEVANT,
        )
        for position in range(n_contexts)
    )
    return EvalInstance(
        instance_id=instance_id,
        question=f"What is asked by {instance_id}?",
        gold_answer=answer,
        contexts=contexts,
        difficulty=level,
        qtype=qtype,
        source=source,
        no_answer_eval=answer is None,
    )


def hotpot_record(
    record_id: str, level: str = "easy", qtype: str = "bridge", **overrides: Any  # noqa: ANN401
) -> dict[str, Any]:
    """A raw HotPotQA distractor record with ten paragraphs, the first two supporting."""
    record = {
        "_id": record_id,
        "question": f"Question {record_id}?",
        "answer": "yes",
        "level": level,
        "type": qtype,
        "supporting_facts": [[f"T{record_id}-0", 0], [f"T{record_id}-1", 1]],
        "context": [[f"T{record_id}-{i}", [f"Sentence one of {i}. ", f"Sentence two of {i}."]] for i in range(10)],
    }
    record.update(overrides)
    return record


@pytest.fixture
def hotpot_population() -> list[EvalInstance]:
    """
    Fixture with 50 HotPotQA-shaped instances per (level, type) pair.

    Returns:
        list[EvalInstance]: 300 instances, 100 relevant and 400 non-relevant pairs per (level, type).

    """
    return [
        make_instance(f"{level.value}-{qtype.value}-{i:03d}", level, qtype)
        for level in LEVELS
        for qtype in TYPES
        for i in range(50)
    ]


@pytest.fixture
def scripted() -> ScriptedBackend:
    """
    Fixture with a scripted backend answering RELEVANT by default.

    Returns:
        ScriptedBackend: The backend.

    """
    return ScriptedBackend(default="RELEVANT")


@pytest.fixture
def client(scripted: ScriptedBackend) -> CompletionClient:
    """
    Fixture with a live client over the scripted backend.

    Returns:
        CompletionClient: The client, with retries that never sleep.

    """
    return CompletionClient(scripted, model_id="test-model", max_in_flight=2, sleep=lambda _: None)


@pytest.fixture
def workdir(tmp_path: Path) -> Iterator[Path]:
    """
    Fixture providing an empty working folder.

    Yields:
        Iterator[Path]: The folder.

    """
    path = tmp_path / "work"
    path.mkdir()
    yield path
