# Copyright (c) 2026 The relevatr authors
"""Load QA corpora as retriever-style evaluation instances and draw stratified samples."""

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
from tqdm import tqdm

from . import settings
from .bm25 import Bm25Index, tokenize
from .exceptions import ArtifactError, DatasetError, SamplingError
from .utils import _iter_jsonl, _read_jsonl, _sha256_text, _write_jsonl


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

MULTI_HOP_RELEVANT = 2
ANY = "*"
_DUPLICATE_SLACK = 5


class GoldLabel(str, Enum):
    """Gold relevance of a context."""

    RELEVANT = "relevant"
    NON_RELEVANT = "non_relevant"
    UNLABELED = "unlabeled"


class Difficulty(str, Enum):
    """HotPotQA difficulty level."""

    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"
    NONE = "none"


class QuestionType(str, Enum):
    """Reasoning type of a question."""

    BRIDGE = "bridge"
    COMPARISON = "comparison"
    SINGLE_HOP = "single_hop"
    NONE = "none"


class Source(str, Enum):
    """Dataset a record comes from."""

    HOTPOTQA = "hotpotqa"
    MUSIQUE = "musique"
    SQUAD2 = "squad2"
    CUSTOM = "custom"


def _normalize_whitespace(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class ContextDoc:
    """A retrieved context document with its gold label."""

    doc_id: str
    text: str
    gold_label: GoldLabel = GoldLabel.UNLABELED
    title: str | None = None

    def __post_init__(self) -> None:
        """Validate the document."""
        if not self.text or not self.text.strip():
            msg = f"Context {self.doc_id!r} has empty text."
            raise DatasetError(msg)
        object.__setattr__(self, "gold_label", GoldLabel(self.gold_label))

    def index_text(self) -> str:
        """Text indexed by BM25: the title followed by the passage."""
        return f"{self.title} {self.text}" if self.title else self.text

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {"doc_id": self.doc_id, "title": self.title, "text": self.text, "gold_label": self.gold_label.value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ContextDoc":
        """Deserialize from to_dict() output."""
        return cls(
            doc_id=str(data["doc_id"]),
            text=str(data["text"]),
            gold_label=GoldLabel(data.get("gold_label", GoldLabel.UNLABELED)),
            title=data.get("title"),
        )


@dataclass(frozen=True)
class EvalInstance:
    """One query with its ground-truth answer and ordered, labeled context list."""

    instance_id: str
    question: str
    gold_answer: str | None
    contexts: tuple[ContextDoc, ...]
    difficulty: Difficulty = Difficulty.NONE
    qtype: QuestionType = QuestionType.NONE
    source: Source = Source.CUSTOM
    no_answer_eval: bool = False

    def __post_init__(self) -> None:
        """Coerce enums and check the per-source invariants."""
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "difficulty", Difficulty(self.difficulty))
        object.__setattr__(self, "qtype", QuestionType(self.qtype))
        object.__setattr__(self, "source", Source(self.source))

        if not self.contexts:
            msg = f"Instance {self.instance_id!r} has no contexts."
            raise DatasetError(msg)
        doc_ids = [context.doc_id for context in self.contexts]
        if len(set(doc_ids)) != len(doc_ids):
            msg = f"Instance {self.instance_id!r} has duplicate doc_ids."
            raise DatasetError(msg)
        if self.gold_answer is None and not self.no_answer_eval:
            msg = f"Instance {self.instance_id!r} has no gold answer and is not flagged for no-answer evaluation."
            raise DatasetError(msg)

        expected_len = {
            Source.HOTPOTQA: settings.hotpotqa_list_len,
            Source.MUSIQUE: settings.musique_list_len,
        }.get(self.source)
        if expected_len is not None:
            if len(self.contexts) != expected_len:
                msg = f"expected {expected_len} contexts, got {len(self.contexts)}"
                raise DatasetError(msg)
            n_relevant = sum(context.gold_label is GoldLabel.RELEVANT for context in self.contexts)
            if n_relevant != MULTI_HOP_RELEVANT:
                msg = f"expected {MULTI_HOP_RELEVANT} relevant contexts, got {n_relevant}"
                raise DatasetError(msg)

    def context(self, doc_id: str) -> ContextDoc:
        """Return the context with the given doc_id."""
        for context in self.contexts:
            if context.doc_id == doc_id:
                return context
        msg = f"Instance {self.instance_id!r} has no context {doc_id!r}."
        raise KeyError(msg)

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict (the `custom` source schema)."""
        return {
            "instance_id": self.instance_id,
            "question": self.question,
            "gold_answer": self.gold_answer,
            "contexts": [context.to_dict() for context in self.contexts],
            "difficulty": self.difficulty.value,
            "qtype": self.qtype.value,
            "source": self.source.value,
            "no_answer_eval": self.no_answer_eval,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EvalInstance":
        """Deserialize from to_dict() output."""
        try:
            return cls(
                instance_id=str(data["instance_id"]),
                question=str(data["question"]),
                gold_answer=data.get("gold_answer"),
                contexts=tuple(ContextDoc.from_dict(context) for context in data["contexts"]),
                difficulty=Difficulty(data.get("difficulty", Difficulty.NONE)),
                qtype=QuestionType(data.get("qtype", QuestionType.NONE)),
                source=Source(data.get("source", Source.CUSTOM)),
                no_answer_eval=bool(data.get("no_answer_eval", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, DatasetError):
                raise
            msg = f"malformed instance: {e}"
            raise DatasetError(msg) from e


@dataclass
class LoadReport:
    """Counts of what a load kept, rejected and could not parse."""

    path: str
    source: str
    loaded: int = 0
    rejected: Counter = field(default_factory=Counter)
    malformed: list[int] = field(default_factory=list)

    @property
    def rejected_total(self) -> int:
        """Number of well-formed records that violated an invariant."""
        return sum(self.rejected.values())

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {
            "path": self.path,
            "source": self.source,
            "loaded": self.loaded,
            "rejected": dict(sorted(self.rejected.items())),
            "malformed_lines": list(self.malformed),
        }


@dataclass(frozen=True)
class SquadRecord:
    """A SQuAD 2.0 question with the paragraph it was written against."""

    question_id: str
    question: str
    context: ContextDoc
    answers: tuple[str, ...]
    answerable: bool


def _squad_doc_id(text: str) -> str:
    return "c" + _sha256_text(_normalize_whitespace(text))[:16]


def _parse_hotpotqa(record: dict[str, Any]) -> EvalInstance:
    supporting_titles = {fact[0] for fact in record.get("supporting_facts", [])}
    contexts = []
    for position, (title, sentences) in enumerate(record["context"]):
        text = " ".join(sentence.strip() for sentence in sentences if sentence.strip())
        label = GoldLabel.RELEVANT if title in supporting_titles else GoldLabel.NON_RELEVANT
        contexts.append(ContextDoc(doc_id=f"p{position:02d}", text=text, gold_label=label, title=title))
    return EvalInstance(
        instance_id=str(record["_id"]),
        question=str(record["question"]),
        gold_answer=str(record["answer"]),
        contexts=tuple(contexts),
        difficulty=Difficulty(record["level"]),
        qtype=QuestionType(record["type"]),
        source=Source.HOTPOTQA,
    )


def _parse_musique(record: dict[str, Any]) -> EvalInstance:
    if record.get("answerable") is False:
        msg = "unanswerable"
        raise DatasetError(msg)
    contexts = []
    for paragraph in record["paragraphs"]:
        label = GoldLabel.RELEVANT if paragraph.get("is_supporting") else GoldLabel.NON_RELEVANT
        contexts.append(
            ContextDoc(
                doc_id=f"p{int(paragraph['idx']):02d}",
                text=str(paragraph["paragraph_text"]),
                gold_label=label,
                title=paragraph.get("title"),
            )
        )
    return EvalInstance(
        instance_id=str(record["id"]),
        question=str(record["question"]),
        gold_answer=str(record["answer"]),
        contexts=tuple(contexts),
        source=Source.MUSIQUE,
    )


def _parse_squad(record: dict[str, Any]) -> SquadRecord:
    answers_field = record.get("answers", [])
    texts = answers_field.get("text", []) if isinstance(answers_field, dict) else answers_field
    answers = tuple(dict.fromkeys(str(text).strip() for text in texts if str(text).strip()))
    answerable = not record.get("is_impossible", not answers)
    if answerable and not answers:
        msg = "answerable question without answers"
        raise DatasetError(msg)

    text = str(record["context"])
    label = GoldLabel.RELEVANT if answerable else GoldLabel.NON_RELEVANT
    context = ContextDoc(doc_id=_squad_doc_id(text), text=text, gold_label=label, title=record.get("title"))
    return SquadRecord(
        question_id=str(record["id"]),
        question=str(record["question"]),
        context=context,
        answers=answers,
        answerable=answerable,
    )


def squad_corpus(records: Iterable[SquadRecord]) -> list[ContextDoc]:
    """
    Collect the unique paragraphs of SQuAD records into an unlabeled corpus.

    Args:
        records (Iterable[SquadRecord]): Parsed SQuAD records.

    Returns:
        list[ContextDoc]: One unlabeled document per distinct paragraph, sorted by doc_id.

    """
    corpus: dict[str, ContextDoc] = {}
    for record in records:
        context = record.context
        corpus.setdefault(
            context.doc_id,
            ContextDoc(doc_id=context.doc_id, text=context.text, title=context.title),
        )
    return [corpus[doc_id] for doc_id in sorted(corpus)]


def adapt_squad(
    records: Sequence[SquadRecord],
    corpus: Sequence[ContextDoc],
    k: int,
    *,
    index: Bm25Index | None = None,
    verbose: bool = False,
) -> list[EvalInstance]:
    """
    Turn SQuAD questions into retriever-style instances with BM25 distractors.

    Each instance lists the original paragraph first (relevant iff the question is answerable), followed by the k
    highest-scoring other corpus documents, unlabeled, by descending BM25 score. Distractors whose text equals the
    original paragraph after whitespace normalization are skipped.

    Args:
        records (Sequence[SquadRecord]): Parsed SQuAD records.
        corpus (Sequence[ContextDoc]): Documents to mine distractors from. Must contain every record's paragraph.
        k (int): Number of distractors per question.
        index (Bm25Index, optional): Prebuilt index over the corpus, built from titles and texts when omitted.
        verbose (bool, optional): Show a progress bar, by default False.

    Returns:
        list[EvalInstance]: One instance of k + 1 contexts per record.

    Raises:
        DatasetError: If k < 1, k >= len(corpus), a paragraph is missing from the corpus or too few distinct
            distractors exist.

    """
    if k < 1:
        msg = f"k must be a positive integer, got {k}."
        raise DatasetError(msg)
    if k >= len(corpus):
        msg = f"Not enough distractors: k={k} needs a corpus of more than {k} documents, got {len(corpus)}."
        raise DatasetError(msg)

    by_id = {doc.doc_id: doc for doc in corpus}
    if index is None:
        index = Bm25Index.build((doc.doc_id, doc.index_text()) for doc in corpus)

    instances = []
    iterator = tqdm(records, desc="Mining distractors") if verbose else records
    for record in iterator:
        gold = record.context
        if gold.doc_id not in by_id:
            msg = f"Gold context of question {record.question_id!r} is missing from the corpus."
            raise DatasetError(msg)

        gold_text = _normalize_whitespace(gold.text)
        query = tokenize(record.question)
        distractors: list[ContextDoc] = []
        for depth in (k + _DUPLICATE_SLACK, len(corpus)):
            distractors = []
            for doc_id, _ in index.top_k(query, depth, exclude={gold.doc_id}):
                doc = by_id[doc_id]
                if _normalize_whitespace(doc.text) == gold_text:
                    continue
                distractors.append(ContextDoc(doc_id=doc.doc_id, text=doc.text, title=doc.title))
                if len(distractors) == k:
                    break
            if len(distractors) == k:
                break
        if len(distractors) < k:
            msg = f"Not enough distinct distractors for question {record.question_id!r}: {len(distractors)} < {k}."
            raise DatasetError(msg)

        instances.append(
            EvalInstance(
                instance_id=record.question_id,
                question=record.question,
                gold_answer=record.answers[0] if record.answerable else None,
                contexts=(gold, *distractors),
                qtype=QuestionType.SINGLE_HOP,
                source=Source.SQUAD2,
                no_answer_eval=not record.answerable,
            )
        )
    return instances


_PARSERS = {
    Source.HOTPOTQA: _parse_hotpotqa,
    Source.MUSIQUE: _parse_musique,
    Source.CUSTOM: EvalInstance.from_dict,
}


def load_dataset(
    path: str | Path,
    source: Source | str,
    *,
    k: int | None = None,
    report: LoadReport | None = None,
    verbose: bool = False,
) -> list[EvalInstance]:
    """
    Load a line-delimited dataset file as evaluation instances.

    Records that violate an instance invariant (for example a multi-hop record without exactly two relevant
    contexts) are skipped and counted in the report; lines that are not JSON objects are skipped and their line
    numbers reported.

    Args:
        path (str | Path): Path to the dataset file, one record per line.
        source (Source | str): Dataset kind, one of hotpotqa, musique, squad2 or custom.
        k (int, optional): Distractors per SQuAD question, by default settings.squad_distractors.
        report (LoadReport, optional): Report to fill in, a fresh one is used when omitted.
        verbose (bool, optional): Show progress and log the load report, by default False.

    Returns:
        list[EvalInstance]: The valid instances in file order.

    Raises:
        DatasetError: If the file cannot be read or holds zero valid instances.

    Examples:
    >>> instances = load_dataset("hotpot_dev_distractor.jsonl", "hotpotqa")

    """
    source = Source(source)
    report = report if report is not None else LoadReport(path=str(path), source=source.value)
    parse = _PARSERS.get(source, _parse_squad)

    parsed: list[Any] = []
    seen_ids: set[str] = set()
    try:
        for line_number, record, error in _iter_jsonl(path):
            if record is None:
                logger.warning("%s:%d: skipped malformed record (%s).", path, line_number, error)
                report.malformed.append(line_number)
                continue
            try:
                item = parse(record)
            except DatasetError as e:
                report.rejected[str(e)] += 1
                continue
            except (KeyError, TypeError, ValueError, IndexError) as e:
                logger.warning("%s:%d: skipped malformed record (%r).", path, line_number, e)
                report.malformed.append(line_number)
                continue
            item_id = item.question_id if isinstance(item, SquadRecord) else item.instance_id
            if item_id in seen_ids:
                report.rejected["duplicate id"] += 1
                continue
            seen_ids.add(item_id)
            parsed.append(item)
    except OSError as e:
        msg = f"Cannot read dataset file {path}: {e}"
        raise DatasetError(msg) from e

    if source is Source.SQUAD2 and parsed:
        k = settings.squad_distractors if k is None else k
        instances = adapt_squad(parsed, squad_corpus(parsed), k, verbose=verbose)
    else:
        instances = parsed

    report.loaded = len(instances)
    if verbose:
        logger.info(
            "Loaded %d instances from %s (%d rejected, %d malformed).",
            report.loaded,
            path,
            report.rejected_total,
            len(report.malformed),
        )
    if not instances:
        msg = f"{path}: zero valid instances."
        raise DatasetError(msg)
    return instances


def write_instances(path: str | Path, instances: Iterable[EvalInstance]) -> Path:
    """Write instances in the `custom` schema, one per line."""
    return _write_jsonl(path, (instance.to_dict() for instance in instances))


def read_instances(path: str | Path) -> list[EvalInstance]:
    """Read instances written by write_instances()."""
    return load_dataset(path, Source.CUSTOM)


def gold_map(instances: Iterable[EvalInstance]) -> dict[tuple[str, str], GoldLabel]:
    """Map every (instance_id, doc_id) key to its gold label."""
    return {
        (instance.instance_id, context.doc_id): context.gold_label
        for instance in instances
        for context in instance.contexts
    }


# Sampling


class Cell(NamedTuple):
    """A sampling stratum. Any field may be the wildcard '*'."""

    difficulty: str
    qtype: str
    gold_label: str

    def __str__(self) -> str:
        """Render as difficulty/qtype/gold_label."""
        return "/".join(self)

    @classmethod
    def parse(cls, text: str) -> "Cell":
        """Parse the str() form of a cell."""
        parts = text.split("/")
        if len(parts) != len(cls._fields):
            msg = f"Invalid cell {text!r}, expected difficulty/qtype/gold_label."
            raise SamplingError(msg)
        return cls(*parts)

    def matches(self, instance: EvalInstance, context: ContextDoc) -> bool:
        """Whether an (instance, context) pair belongs to this cell."""
        values = (instance.difficulty.value, instance.qtype.value, context.gold_label.value)
        return all(want in {ANY, have} for want, have in zip(self, values, strict=True))


@dataclass(frozen=True)
class SamplingPlan:
    """Per-cell sample sizes and the seed that draws them."""

    per_cell_counts: dict[Cell, int]
    seed: int = settings.seed

    def __post_init__(self) -> None:
        """Validate the counts."""
        for cell, count in self.per_cell_counts.items():
            if count < 0:
                msg = f"Cell {cell} has a negative count."
                raise SamplingError(msg)

    @property
    def total(self) -> int:
        """Requested sample size."""
        return sum(self.per_cell_counts.values())

    @classmethod
    def replication(cls, seed: int = settings.seed, per_cell: int | None = None) -> "SamplingPlan":
        """
        HotPotQA replication plan: every (level, type) pair split evenly between relevant and non-relevant.

        With the default 100 per cell this is 1,200 pairs, 400 per level, 200 per (level, type), 600 per label.

        Args:
            seed (int, optional): Sampling seed, by default settings.seed.
            per_cell (int, optional): Pairs per (level, type, label) cell, by default settings.replication_per_cell.

        Returns:
            SamplingPlan: The plan.

        """
        per_cell = settings.replication_per_cell if per_cell is None else per_cell
        counts = {
            Cell(level.value, qtype.value, label.value): per_cell
            for level in (Difficulty.EASY, Difficulty.MEDIUM, Difficulty.HARD)
            for qtype in (QuestionType.BRIDGE, QuestionType.COMPARISON)
            for label in (GoldLabel.RELEVANT, GoldLabel.NON_RELEVANT)
        }
        return cls(per_cell_counts=counts, seed=seed)

    @classmethod
    def balanced(cls, seed: int = settings.seed, per_label: int | None = None) -> "SamplingPlan":
        """Label-balanced plan ignoring difficulty and type, by default 600 relevant and 600 non-relevant pairs."""
        per_label = settings.balanced_per_label if per_label is None else per_label
        counts = {Cell(ANY, ANY, label.value): per_label for label in (GoldLabel.RELEVANT, GoldLabel.NON_RELEVANT)}
        return cls(per_cell_counts=counts, seed=seed)

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {
            "seed": self.seed,
            "cells": {str(cell): count for cell, count in sorted(self.per_cell_counts.items())},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SamplingPlan":
        """Deserialize from to_dict() output."""
        counts = {Cell.parse(cell): int(count) for cell, count in data["cells"].items()}
        return cls(per_cell_counts=counts, seed=int(data.get("seed", settings.seed)))


@dataclass(frozen=True)
class SampledPair:
    """One sampled (instance, context) pair and the cell it was drawn for."""

    instance: EvalInstance
    context: ContextDoc
    cell: Cell

    @property
    def key(self) -> tuple[str, str]:
        """The (instance_id, doc_id) key."""
        return self.instance.instance_id, self.context.doc_id


def stratified_sample(instances: Sequence[EvalInstance], plan: SamplingPlan) -> list[SampledPair]:
    """
    Draw (instance, context) pairs without replacement, exactly plan(c) from every cell c.

    Within a cell the draw is uniform over the eligible pairs, sorted by (instance_id, doc_id) first so the result
    depends only on the population and the seed. The output is sorted by (cell, instance_id, doc_id).

    Args:
        instances (Sequence[EvalInstance]): The population.
        plan (SamplingPlan): Per-cell counts and seed.

    Returns:
        list[SampledPair]: The sample.

    Raises:
        SamplingError: If a cell has fewer eligible pairs than requested, cells overlap, or instance ids repeat.

    """
    ids = [instance.instance_id for instance in instances]
    if len(set(ids)) != len(ids):
        msg = "Instance ids must be unique to sample pairs."
        raise SamplingError(msg)

    cells = sorted(cell for cell, count in plan.per_cell_counts.items() if count > 0)
    population: dict[Cell, list[tuple[EvalInstance, ContextDoc]]] = {cell: [] for cell in cells}
    for instance in instances:
        for context in instance.contexts:
            matching = [cell for cell in cells if cell.matches(instance, context)]
            if len(matching) > 1:
                msg = f"Cells {', '.join(map(str, matching))} overlap."
                raise SamplingError(msg)
            if matching:
                population[matching[0]].append((instance, context))

    shortfalls = [
        f"{cell} (requested {plan.per_cell_counts[cell]}, eligible {len(population[cell])}, "
        f"short by {plan.per_cell_counts[cell] - len(population[cell])})"
        for cell in cells
        if len(population[cell]) < plan.per_cell_counts[cell]
    ]
    if shortfalls:
        msg = "Insufficient population in cell " + "; ".join(shortfalls)
        raise SamplingError(msg)

    rng = np.random.default_rng(plan.seed)
    sample = []
    for cell in cells:
        pairs = sorted(population[cell], key=lambda pair: (pair[0].instance_id, pair[1].doc_id))
        chosen = rng.choice(len(pairs), size=plan.per_cell_counts[cell], replace=False)
        sample.extend(SampledPair(*pairs[i], cell=cell) for i in sorted(chosen.tolist()))
    return sample


def write_sample_manifest(path: str | Path, sample: Iterable[SampledPair]) -> Path:
    """Write (instance_id, doc_id, cell) rows, one per line."""
    rows = (
        {"instance_id": pair.instance.instance_id, "doc_id": pair.context.doc_id, "cell": str(pair.cell)}
        for pair in sample
    )
    return _write_jsonl(path, rows)


def read_sample_manifest(path: str | Path, instances: Iterable[EvalInstance]) -> list[SampledPair]:
    """
    Resolve a sample manifest against its instances.

    Args:
        path (str | Path): Manifest written by write_sample_manifest().
        instances (Iterable[EvalInstance]): The instances the manifest was drawn from.

    Returns:
        list[SampledPair]: The sampled pairs in manifest order.

    Raises:
        ArtifactError: If a row is malformed.
        SamplingError: If a row references an unknown instance or context.

    """
    by_id = {instance.instance_id: instance for instance in instances}
    sample = []
    for row in _read_jsonl(path):
        if not {"instance_id", "doc_id", "cell"} <= row.keys():
            msg = f"{path}: sample row {row} lacks instance_id, doc_id or cell."
            raise ArtifactError(msg)
        instance = by_id.get(row["instance_id"])
        if instance is None:
            msg = f"Manifest row references unknown instance {row['instance_id']!r}."
            raise SamplingError(msg)
        try:
            context = instance.context(row["doc_id"])
        except KeyError as e:
            raise SamplingError(str(e)) from e
        sample.append(SampledPair(instance=instance, context=context, cell=Cell.parse(row["cell"])))
    return sample


def count_by_cell(sample: Iterable[SampledPair]) -> dict[str, int]:
    """Number of sampled pairs per cell."""
    return dict(sorted(Counter(str(pair.cell) for pair in sample).items()))


