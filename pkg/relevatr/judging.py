# Copyright (c) 2026 The relevatr authors
"""The indirect, direct and context-aware (CARE) relevance judges."""

import csv
import json
import logging
import re
import unicodedata
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import CancelledError, Future, ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from tqdm import tqdm

from . import settings
from .datasets import ContextDoc, EvalInstance, GoldLabel, SampledPair
from .exceptions import (
    ArtifactError,
    DatasetError,
    KeyMismatchError,
    MissingAnswerError,
    PromptError,
    UnparseableVerdictError,
)
from .prompts import (
    PromptVariant,
    Strategy,
    format_context,
    format_context_list,
    load_template,
    render,
)
from .transport import CompletionClient, CompletionResponse
from .utils import _iter_jsonl, _sha256_text, _write_jsonl


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

UNANSWERABLE = "UNANSWERABLE"
VERDICT_MARKER = re.compile(r"verdict\s*:", re.IGNORECASE)
VERDICT_TOKEN = re.compile(r"(?<![\w-])(?:(not|non)[\s_-]*)?relevant(?![\w-])", re.IGNORECASE)
RETRY_REMINDER = "\n\nReply with exactly one word: RELEVANT or NOT_RELEVANT."
COT_RETRY_REMINDER = "\n\nEnd your reply with a final line that is exactly VERDICT: RELEVANT or VERDICT: NOT_RELEVANT."
_ANSWER_PREFIX = re.compile(r"^\s*(?:final\s+)?answer\s*:\s*", re.IGNORECASE)
_LEADING_ARTICLE = re.compile(r"^(?:a|an|the)\s+")


class MatcherMode(str, Enum):
    """Exact-match flavour of the indirect judge."""

    STRICT = "strict"
    NORMALIZED = "normalized"


class UnparseablePolicy(str, Enum):
    """What to do when a judge response carries no verdict."""

    RETRY_ONCE_THEN_NONRELEVANT = "retry_once_then_nonrelevant"
    RETRY_ONCE_THEN_ERROR = "retry_once_then_error"


PREDICTED_LABELS = (GoldLabel.RELEVANT, GoldLabel.NON_RELEVANT)


@dataclass(frozen=True)
class StrategyConfig:
    """A judge configuration: strategy, prompt variant and response handling."""

    strategy: Strategy
    prompt_variant: PromptVariant = PromptVariant.STANDARD
    care_list_len: int | None = None
    matcher_mode: MatcherMode = MatcherMode.NORMALIZED
    unparseable_policy: UnparseablePolicy = UnparseablePolicy.RETRY_ONCE_THEN_NONRELEVANT

    def __post_init__(self) -> None:
        """Coerce enums, resolve the list length and check that a template exists."""
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "prompt_variant", PromptVariant(self.prompt_variant))
        object.__setattr__(self, "matcher_mode", MatcherMode(self.matcher_mode))
        object.__setattr__(self, "unparseable_policy", UnparseablePolicy(self.unparseable_policy))
        if self.strategy is Strategy.CARE:
            n = settings.care_list_len if self.care_list_len is None else self.care_list_len
            if n < 0:
                msg = f"care_list_len must be >= 0, got {n}."
                raise ValueError(msg)
        else:
            n = 0
        object.__setattr__(self, "care_list_len", n)
        load_template(self.strategy, self.prompt_variant)

    @property
    def label(self) -> str:
        """Short run label, e.g. 'direct', 'care10' or 'care10-cot'."""
        base = f"care{self.care_list_len}" if self.strategy is Strategy.CARE else self.strategy.value
        if self.prompt_variant is PromptVariant.STANDARD:
            return base
        return f"{base}-{self.prompt_variant.value}"

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {
            "strategy": self.strategy.value,
            "prompt_variant": self.prompt_variant.value,
            "care_list_len": self.care_list_len,
            "matcher_mode": self.matcher_mode.value,
            "unparseable_policy": self.unparseable_policy.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StrategyConfig":
        """Deserialize from to_dict() output."""
        return cls(**data)


@dataclass(frozen=True)
class Prompt:
    """A rendered prompt and its accounting."""

    text: str
    template_name: str
    template_digest: str
    n_list: int

    @property
    def chars(self) -> int:
        """Prompt length in characters."""
        return len(self.text)

    @property
    def prompt_hash(self) -> str:
        """SHA-256 of the prompt text."""
        return _sha256_text(self.text)


@dataclass(frozen=True)
class JudgeVerdict:
    """One relevance prediction with its transcript and prompt accounting."""

    instance_id: str
    doc_id: str
    strategy: str
    model_id: str
    predicted: GoldLabel
    raw_response: str
    generated_answer: str | None = None
    prompt_chars: int = 0
    latency_ms: int = 0
    prompt_hash: str = ""
    parse_failed: bool = False

    def __post_init__(self) -> None:
        """Restrict predicted to the two binary labels."""
        predicted = GoldLabel(self.predicted)
        if predicted not in PREDICTED_LABELS:
            msg = f"predicted must be relevant or non_relevant, got {predicted.value!r}."
            raise ValueError(msg)
        object.__setattr__(self, "predicted", predicted)
        if self.prompt_chars < 0 or self.latency_ms < 0:
            msg = "prompt_chars and latency_ms must be >= 0."
            raise ValueError(msg)

    @property
    def key(self) -> tuple[str, str]:
        """The (instance_id, doc_id) key."""
        return self.instance_id, self.doc_id

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict."""
        return {
            "instance_id": self.instance_id,
            "doc_id": self.doc_id,
            "strategy": self.strategy,
            "model_id": self.model_id,
            "predicted": self.predicted.value,
            "raw_response": self.raw_response,
            "generated_answer": self.generated_answer,
            "prompt_chars": self.prompt_chars,
            "latency_ms": self.latency_ms,
            "prompt_hash": self.prompt_hash,
            "parse_failed": self.parse_failed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "JudgeVerdict":
        """Deserialize from to_dict() output."""
        return cls(
            instance_id=str(data["instance_id"]),
            doc_id=str(data["doc_id"]),
            strategy=str(data["strategy"]),
            model_id=str(data["model_id"]),
            predicted=GoldLabel(data["predicted"]),
            raw_response=str(data.get("raw_response", "")),
            generated_answer=data.get("generated_answer"),
            prompt_chars=int(data.get("prompt_chars", 0)),
            latency_ms=int(data.get("latency_ms", 0)),
            prompt_hash=str(data.get("prompt_hash", "")),
            parse_failed=bool(data.get("parse_failed", False)),
        )


def care_list_view(config: StrategyConfig, instance: EvalInstance) -> tuple[ContextDoc, ...]:
    """The first min(n, |contexts|) contexts in retrieval order for CARE, nothing for the other strategies."""
    if config.strategy is not Strategy.CARE:
        return ()
    return instance.contexts[: config.care_list_len]


def build_prompt(
    config: StrategyConfig,
    instance: EvalInstance,
    target: ContextDoc,
    list_view: Sequence[ContextDoc] | None = None,
) -> Prompt:
    """
    Render the prompt judging one context.

    The target is always passed in its own slot, also when it appears in the CARE list. Gold relevance labels are
    never rendered.

    Args:
        config (StrategyConfig): The judge configuration.
        instance (EvalInstance): The instance holding the question and answer.
        target (ContextDoc): The context under evaluation.
        list_view (Sequence[ContextDoc], optional): The list view, by default care_list_view(config, instance).

    Returns:
        Prompt: The prompt with its template digest and list size.

    Raises:
        MissingAnswerError: If the template needs the gold answer and the instance has none.
        PromptError: If list_view does not follow the strategy's list rule.

    """
    expected = care_list_view(config, instance)
    if list_view is None:
        list_view = expected
    elif tuple(list_view) != expected:
        msg = (
            f"List view for {config.strategy.value} must be the first {len(expected)} contexts of the instance, "
            f"got {len(list_view)}."
        )
        raise PromptError(msg)

    template = load_template(config.strategy, config.prompt_variant)
    values = {
        "question": instance.question,
        "context": format_context(target),
        "context_list": format_context_list(list_view),
    }
    if "answer" in template.placeholders:
        if instance.gold_answer is None:
            msg = (
                f"Instance {instance.instance_id!r} has no gold answer; "
                f"use the {PromptVariant.NO_ANSWER.value} variant."
            )
            raise MissingAnswerError(msg)
        values["answer"] = instance.gold_answer

    return Prompt(
        text=render(template, values),
        template_name=template.name,
        template_digest=template.digest,
        n_list=len(list_view),
    )


def _normalize_answer(text: str) -> str:
    text = text.lower()
    text = "".join(char for char in text if not unicodedata.category(char).startswith("P"))
    text = " ".join(text.split())
    return _LEADING_ARTICLE.sub("", text)


def exact_match(candidate: str, gold: str, mode: MatcherMode | str = MatcherMode.NORMALIZED) -> bool:
    """
    Compare a generated answer with the gold answer.

    Args:
        candidate (str): Generated answer.
        gold (str): Gold answer.
        mode (MatcherMode | str, optional): strict compares after trimming outer whitespace. normalized also
            lowercases, strips punctuation, collapses whitespace and drops a leading article. Default normalized.

    Returns:
        bool: Whether the answers match.

    Examples:
    >>> exact_match("the Eiffel Tower", "Eiffel Tower")
    True

    """
    if MatcherMode(mode) is MatcherMode.STRICT:
        return candidate.strip() == gold.strip()
    return _normalize_answer(candidate) == _normalize_answer(gold)


def parse_verdict(raw: str) -> GoldLabel:
    """
    Read the relevance label from a judge response.

    Only the text after the last 'VERDICT:' marker is read when one is present. The tokens RELEVANT and
    NOT_RELEVANT are matched case-insensitively as standalone words; 'NOT RELEVANT', 'NOT-RELEVANT' and
    'NON_RELEVANT' count as NOT_RELEVANT and never as RELEVANT.

    Args:
        raw (str): The response text.

    Returns:
        GoldLabel: relevant or non_relevant.

    Raises:
        UnparseableVerdictError: If both labels or neither appear.

    """
    markers = list(VERDICT_MARKER.finditer(raw))
    text = raw[markers[-1].end() :] if markers else raw

    found = {
        GoldLabel.NON_RELEVANT if match.group(1) else GoldLabel.RELEVANT for match in VERDICT_TOKEN.finditer(text)
    }
    if len(found) != 1:
        reason = "both labels" if found else "no label"
        msg = f"Unparseable verdict ({reason}): {raw[:200]!r}"
        raise UnparseableVerdictError(msg)
    return found.pop()


def extract_answer(raw: str) -> str:
    """First non-empty line of an indirect response, without an 'Answer:' prefix."""
    for line in raw.splitlines():
        answer = _ANSWER_PREFIX.sub("", line).strip()
        if answer:
            return answer
    return ""


def is_unanswerable(answer: str) -> bool:
    """Whether a generated answer is the unanswerable sentinel."""
    return _normalize_answer(answer) == UNANSWERABLE.lower()


def _require_strategy(config: StrategyConfig, strategy: Strategy) -> None:
    if config.strategy is not strategy:
        msg = f"Expected a {strategy.value} configuration, got {config.strategy.value}."
        raise ValueError(msg)


def _classify(
    client: CompletionClient, config: StrategyConfig, instance: EvalInstance, target: ContextDoc
) -> JudgeVerdict:
    prompt = build_prompt(config, instance, target)
    response = client.complete(prompt.text)
    latency_ms = response.latency_ms
    parse_failed = False
    try:
        predicted = parse_verdict(response.text)
    except UnparseableVerdictError as e:
        logger.warning("%s/%s: %s Retrying once.", instance.instance_id, target.doc_id, e)
        reminder = COT_RETRY_REMINDER if config.prompt_variant is PromptVariant.COT else RETRY_REMINDER
        response = client.complete(prompt.text + reminder)
        latency_ms += response.latency_ms
        try:
            predicted = parse_verdict(response.text)
        except UnparseableVerdictError:
            if config.unparseable_policy is UnparseablePolicy.RETRY_ONCE_THEN_ERROR:
                raise
            predicted, parse_failed = GoldLabel.NON_RELEVANT, True

    return _verdict(client, config, instance, target, prompt, response, predicted, latency_ms, parse_failed)


def _verdict(
    client: CompletionClient,
    config: StrategyConfig,
    instance: EvalInstance,
    target: ContextDoc,
    prompt: Prompt,
    response: CompletionResponse,
    predicted: GoldLabel,
    latency_ms: int,
    parse_failed: bool = False,  # noqa: FBT001, FBT002
    generated_answer: str | None = None,
) -> JudgeVerdict:
    return JudgeVerdict(
        instance_id=instance.instance_id,
        doc_id=target.doc_id,
        strategy=config.label,
        model_id=client.model_id,
        predicted=predicted,
        raw_response=response.text,
        generated_answer=generated_answer,
        prompt_chars=prompt.chars,
        latency_ms=latency_ms,
        prompt_hash=prompt.prompt_hash,
        parse_failed=parse_failed,
    )


def judge_direct(
    client: CompletionClient, config: StrategyConfig, instance: EvalInstance, target: ContextDoc
) -> JudgeVerdict:
    """
    Ask the model whether the target is relevant given the question and, unless no_answer, the gold answer.

    Args:
        client (CompletionClient): Completion client.
        config (StrategyConfig): A direct configuration.
        instance (EvalInstance): The instance.
        target (ContextDoc): The context under evaluation.

    Returns:
        JudgeVerdict: The verdict. An unparseable response is retried once with a format reminder, then handled per
            config.unparseable_policy.

    """
    _require_strategy(config, Strategy.DIRECT)
    return _classify(client, config, instance, target)


def judge_care(
    client: CompletionClient, config: StrategyConfig, instance: EvalInstance, target: ContextDoc
) -> JudgeVerdict:
    """Like judge_direct, with the first n retrieved contexts shown as a list."""
    _require_strategy(config, Strategy.CARE)
    return _classify(client, config, instance, target)


def judge_indirect(
    client: CompletionClient, config: StrategyConfig, instance: EvalInstance, target: ContextDoc
) -> JudgeVerdict:
    """
    Answer the question from the target alone and label it by exact match against the gold answer.

    Args:
        client (CompletionClient): Completion client.
        config (StrategyConfig): An indirect configuration.
        instance (EvalInstance): The instance. Must have a gold answer.
        target (ContextDoc): The context under evaluation.

    Returns:
        JudgeVerdict: relevant iff the generated answer is not UNANSWERABLE and matches the gold answer.

    Raises:
        MissingAnswerError: If the instance has no gold answer.

    """
    _require_strategy(config, Strategy.INDIRECT)
    if instance.gold_answer is None:
        msg = f"Indirect evaluation needs a gold answer; instance {instance.instance_id!r} has none."
        raise MissingAnswerError(msg)

    prompt = build_prompt(config, instance, target)
    response = client.complete(prompt.text)
    answer = extract_answer(response.text)
    matched = not is_unanswerable(answer) and exact_match(answer, instance.gold_answer, config.matcher_mode)
    predicted = GoldLabel.RELEVANT if matched else GoldLabel.NON_RELEVANT
    return _verdict(
        client, config, instance, target, prompt, response, predicted, response.latency_ms, generated_answer=answer
    )


JUDGES: dict[Strategy, Callable[..., JudgeVerdict]] = {
    Strategy.INDIRECT: judge_indirect,
    Strategy.DIRECT: judge_direct,
    Strategy.CARE: judge_care,
}


def judge(
    client: CompletionClient, config: StrategyConfig, instance: EvalInstance, target: ContextDoc
) -> JudgeVerdict:
    """Dispatch to the judge of config.strategy."""
    return JUDGES[config.strategy](client, config, instance, target)


def judge_all(
    client: CompletionClient,
    config: StrategyConfig,
    pairs: Iterable[SampledPair],
    *,
    skip: Iterable[tuple[str, str]] = (),
    on_verdict: Callable[[JudgeVerdict], None] | None = None,
    workers: int | None = None,
    verbose: bool = False,
) -> list[JudgeVerdict]:
    """
    Judge many pairs concurrently, up to the client's in-flight bound.

    Verdicts are handed to on_verdict as they complete, so progress survives a failure. After the first failure the
    pairs not yet started are cancelled, the running ones finish, and the failure is re-raised.

    Args:
        client (CompletionClient): Completion client.
        config (StrategyConfig): The judge configuration.
        pairs (Iterable[SampledPair]): Pairs to judge.
        skip (Iterable[tuple[str, str]], optional): Keys already judged.
        on_verdict (Callable, optional): Called from this thread for every completed verdict.
        workers (int, optional): Thread count, by default client.max_in_flight.
        verbose (bool, optional): Show a progress bar, by default False.

    Returns:
        list[JudgeVerdict]: The new verdicts, sorted by key.

    """
    done = set(skip)
    pending = [pair for pair in pairs if pair.key not in done]
    if len(done) and verbose:
        logger.info("Skipping %d already judged pairs.", len(done))

    verdicts: list[JudgeVerdict] = []
    failures: list[Exception] = []
    with ThreadPoolExecutor(max_workers=workers or client.max_in_flight) as pool:
        futures: dict[Future, tuple[str, str]] = {
            pool.submit(judge, client, config, pair.instance, pair.context): pair.key for pair in pending
        }
        iterator = as_completed(futures)
        if verbose:
            iterator = tqdm(iterator, total=len(futures), desc=f"Judging ({config.label})")
        for future in iterator:
            try:
                verdict = future.result()
            except CancelledError:
                continue
            except Exception as e:  # noqa: BLE001
                if not failures:
                    for other in futures:
                        other.cancel()
                failures.append(e)
                continue
            if on_verdict is not None:
                on_verdict(verdict)
            verdicts.append(verdict)

    if failures:
        logger.error(
            "%d of %d judgments failed, %d persisted. First failure: %s",
            len(failures),
            len(pending),
            len(verdicts),
            failures[0],
        )
        raise failures[0]
    return sorted(verdicts, key=lambda verdict: verdict.key)


def verdict_index(verdicts: Iterable[JudgeVerdict]) -> dict[tuple[str, str], JudgeVerdict]:
    """
    Key verdicts by (instance_id, doc_id).

    Raises:
        KeyMismatchError: If a key appears twice.

    """
    index: dict[tuple[str, str], JudgeVerdict] = {}
    for verdict in verdicts:
        if verdict.key in index:
            msg = f"Duplicate verdict for {verdict.key}."
            raise KeyMismatchError(msg)
        index[verdict.key] = verdict
    return index


def write_verdicts(path: str | Path, verdicts: Iterable[JudgeVerdict]) -> Path:
    """Write verdicts one per line, sorted by (instance_id, doc_id)."""
    ordered = sorted(verdict_index(verdicts).values(), key=lambda verdict: verdict.key)
    return _write_jsonl(path, (verdict.to_dict() for verdict in ordered))


def _verdict_from_record(
    path: str | Path, line_number: int, record: dict[str, Any] | None, error: str | None
) -> JudgeVerdict:
    if record is None:
        msg = f"{path}:{line_number}: {error}"
        raise ArtifactError(msg)
    try:
        return JudgeVerdict.from_dict(record)
    except (KeyError, TypeError, ValueError) as e:
        msg = f"{path}:{line_number}: not a verdict ({e!r})."
        raise ArtifactError(msg) from e


def read_verdicts(path: str | Path) -> list[JudgeVerdict]:
    """
    Read a verdict file. A key repeated by a resumed run keeps its last verdict.

    Raises:
        ArtifactError: If a line is not a valid verdict.

    """
    latest = {}
    for line_number, record, error in _iter_jsonl(path):
        verdict = _verdict_from_record(path, line_number, record, error)
        latest[verdict.key] = verdict
    return sorted(latest.values(), key=lambda verdict: verdict.key)


def resume_verdicts(path: str | Path) -> list[JudgeVerdict]:
    """
    Read the verdict file of an interrupted run.

    A run killed while appending leaves a torn last line. That line is cut off, with a warning, so its pair is judged
    again and the next append starts on a fresh line. Malformed lines elsewhere are not repaired.

    Returns:
        list[JudgeVerdict]: The intact verdicts, or an empty list when the file does not exist.

    Raises:
        ArtifactError: If a line other than the last is not a valid verdict.

    """
    path = Path(path)
    if not path.exists():
        return []
    lines = path.read_text(encoding="utf-8").splitlines(keepends=True)
    while lines and not lines[-1].strip():
        lines.pop()
    torn = False
    if lines:
        try:
            _verdict_from_record(path, len(lines), json.loads(lines[-1]), None)
        except (json.JSONDecodeError, ArtifactError):
            torn = True
    if torn:
        logger.warning("%s:%d: dropping an incomplete verdict, its pair will be judged again.", path, len(lines))
        lines.pop()
    if torn or (lines and not lines[-1].endswith("\n")):
        with path.open("w", encoding="utf-8", newline="\n") as file:
            file.writelines(line if line.endswith("\n") else line + "\n" for line in lines)
    return read_verdicts(path)


def review_rows(verdicts: Iterable[JudgeVerdict], instances: Iterable[EvalInstance]) -> list[dict[str, str]]:
    """
    Indirect answers that are neither the sentinel nor a match, for external adjudication.

    Args:
        verdicts (Iterable[JudgeVerdict]): Indirect verdicts.
        instances (Iterable[EvalInstance]): Their instances.

    Returns:
        list[dict]: (instance_id, doc_id, generated_answer, gold_answer) rows sorted by key.

    """
    gold_answers = {instance.instance_id: instance.gold_answer for instance in instances}
    rows = []
    for verdict in sorted(verdicts, key=lambda verdict: verdict.key):
        answer = verdict.generated_answer
        if answer is None or is_unanswerable(answer) or verdict.predicted is GoldLabel.RELEVANT:
            continue
        rows.append(
            {
                "instance_id": verdict.instance_id,
                "doc_id": verdict.doc_id,
                "generated_answer": answer,
                "gold_answer": gold_answers.get(verdict.instance_id),
            }
        )
    return rows


def write_review(path: str | Path, verdicts: Iterable[JudgeVerdict], instances: Iterable[EvalInstance]) -> Path:
    """Write review_rows() one per line."""
    return _write_jsonl(path, review_rows(verdicts, instances))


_PREDICTED_ALIASES = {
    "relevant": GoldLabel.RELEVANT,
    "1": GoldLabel.RELEVANT,
    "true": GoldLabel.RELEVANT,
    "yes": GoldLabel.RELEVANT,
    "non_relevant": GoldLabel.NON_RELEVANT,
    "not_relevant": GoldLabel.NON_RELEVANT,
    "0": GoldLabel.NON_RELEVANT,
    "false": GoldLabel.NON_RELEVANT,
    "no": GoldLabel.NON_RELEVANT,
}


def import_verdicts(
    path: str | Path,
    *,
    strategy: str | None = None,
    model_id: str | None = None,
    delimiter: str | None = None,
) -> list[JudgeVerdict]:
    """
    Read externally produced labels from a delimited file.

    Args:
        path (str | Path): File with columns instance_id, doc_id, predicted and optionally strategy and model.
        strategy (str, optional): Strategy label for rows without a strategy column.
        model_id (str, optional): Model id for rows without a model column.
        delimiter (str, optional): Column delimiter, tab for .tsv files and comma otherwise.

    Returns:
        list[JudgeVerdict]: Verdicts without transcripts, sorted by key.

    Raises:
        DatasetError: If a required column is missing or a label is not recognised.

    """
    path = Path(path)
    delimiter = delimiter or ("\t" if path.suffix.lower() == ".tsv" else ",")
    verdicts = []
    with path.open(encoding="utf-8", newline="") as file:
        reader = csv.DictReader(file, delimiter=delimiter)
        missing = {"instance_id", "doc_id", "predicted"} - set(reader.fieldnames or ())
        if missing:
            msg = f"{path} lacks columns: {', '.join(sorted(missing))}."
            raise DatasetError(msg)
        for line_number, row in enumerate(reader, start=2):
            label = _PREDICTED_ALIASES.get(row["predicted"].strip().lower().replace("-", "_").replace(" ", "_"))
            if label is None:
                msg = f"{path}:{line_number}: unrecognised label {row['predicted']!r}."
                raise DatasetError(msg)
            verdicts.append(
                JudgeVerdict(
                    instance_id=row["instance_id"],
                    doc_id=row["doc_id"],
                    strategy=row.get("strategy") or strategy or "imported",
                    model_id=row.get("model") or model_id or "unknown",
                    predicted=label,
                    raw_response="",
                )
            )
    return sorted(verdict_index(verdicts).values(), key=lambda verdict: verdict.key)
