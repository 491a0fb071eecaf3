# Copyright (c) 2026 The relevatr authors
"""Command-line interface: prepare, run, score, compare, report and import-verdicts."""

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from . import settings
from .datasets import (
    Cell,
    EvalInstance,
    GoldLabel,
    LoadReport,
    SampledPair,
    SamplingPlan,
    Source,
    count_by_cell,
    gold_map,
    load_dataset,
    read_instances,
    read_sample_manifest,
    stratified_sample,
    write_instances,
    write_sample_manifest,
)
from .exceptions import INPUT_ERRORS, PromptError, TransportError, UsageError
from .judging import (
    JudgeVerdict,
    MatcherMode,
    StrategyConfig,
    UnparseablePolicy,
    import_verdicts,
    judge_all,
    read_verdicts,
    resume_verdicts,
    write_review,
    write_verdicts,
)
from .manifest import RunManifest, bm25_settings
from .metrics import METRICS, Metric, confusion, metric, metric_flags
from .prompts import PromptVariant, Strategy, load_template, template_digests
from .reporting import (
    FILE_SUFFIXES,
    OutputFormat,
    build_report,
    emit,
    format_prompt_lengths,
    format_table,
    parse_strata,
    prompt_length_summary,
)
from .stats import BootstrapConfig, permutation_test
from .transport import BACKENDS, ClientMode, CompletionClient, ReplayStore, make_backend
from .utils import _append_jsonl, _sha256_file, _write_jsonl


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_TRANSPORT_ERROR = 3
EXIT_INTERNAL_ERROR = 4

PLANS = ("replication", "balanced", "all", "labeled")
DEFAULT_PLANS = {Source.HOTPOTQA: "replication"}
INSTANCES_FILE = "instances.jsonl"
SAMPLE_FILE = "sample.jsonl"
MANIFEST_FILE = "manifest.json"
VERDICTS_FILE = "verdicts.jsonl"
REVIEW_FILE = "review.jsonl"
SCORE_FILE = "score.json"


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if not getattr(args, name, None)]
    if missing:
        msg = f"{args.command}: missing required option(s) {', '.join(missing)}."
        raise UsageError(msg)


def _load_prepared(prepared: str | Path) -> tuple[RunManifest, list[EvalInstance], list[SampledPair]]:
    prepared = Path(prepared)
    manifest_path = prepared / MANIFEST_FILE
    if not manifest_path.exists():
        msg = f"{prepared} is not a prepared directory (no {MANIFEST_FILE})."
        raise UsageError(msg)
    try:
        manifest = RunManifest.read(manifest_path)
    except ValueError as e:
        raise UsageError(str(e)) from e
    instances = read_instances(prepared / INSTANCES_FILE)
    sample = read_sample_manifest(prepared / SAMPLE_FILE, instances)
    return manifest, instances, sample


def _infer_prepared(args: argparse.Namespace, verdict_path: str | Path) -> Path:
    """--prepared, or the prepared directory a run directory lives in."""
    if args.prepared:
        return Path(args.prepared)
    candidate = Path(verdict_path).resolve().parent.parent.parent
    if (candidate / MANIFEST_FILE).exists() and (candidate / INSTANCES_FILE).exists():
        return candidate
    msg = f"{args.command}: --prepared is required for verdicts outside a run directory ({verdict_path})."
    raise UsageError(msg)


def _all_pairs(instances: Sequence[EvalInstance], *, labeled_only: bool) -> list[SampledPair]:
    pairs = [
        SampledPair(
            instance=instance,
            context=context,
            cell=Cell(instance.difficulty.value, instance.qtype.value, context.gold_label.value),
        )
        for instance in instances
        for context in instance.contexts
        if not (labeled_only and context.gold_label is GoldLabel.UNLABELED)
    ]
    return sorted(pairs, key=lambda pair: pair.key)


def _resolve_plan(args: argparse.Namespace, source: Source) -> SamplingPlan | str:
    """The --plan option, by default the replication plan for HotPotQA and every labeled pair otherwise."""
    plan = args.plan or DEFAULT_PLANS.get(source, "labeled")
    if plan in {"all", "labeled"}:
        return plan
    seed = settings.seed if args.seed is None else args.seed
    if plan == "replication":
        return SamplingPlan.replication(seed=seed, per_cell=args.per_cell)
    if plan == "balanced":
        return SamplingPlan.balanced(seed=seed, per_label=args.per_label)
    plan_path = Path(plan)
    if not plan_path.exists():
        msg = f"Unknown plan {plan!r}: neither one of {', '.join(PLANS)} nor an existing file."
        raise UsageError(msg)
    try:
        with plan_path.open(encoding="utf-8") as file:
            data = json.load(file)
        if args.seed is not None:
            data["seed"] = args.seed
        return SamplingPlan.from_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as e:
        msg = f"Invalid plan file {plan_path}: {e!r}"
        raise UsageError(msg) from e


def cmd_prepare(args: argparse.Namespace) -> Path:
    """Load and adapt a dataset, draw the sample and write them under a digest-named directory."""
    _require(args, "input", "source")
    source = Source(args.source)
    report = LoadReport(path=str(args.input), source=source.value)
    instances = load_dataset(args.input, source, k=args.k, report=report, verbose=args.verbose)

    plan = _resolve_plan(args, source)
    if isinstance(plan, SamplingPlan):
        sample = stratified_sample(instances, plan)
        sampling = plan.to_dict()
    else:
        sample = _all_pairs(instances, labeled_only=plan == "labeled")
        sampling = {"plan": plan}
    drawn = count_by_cell(sample)
    sampling["drawn"] = drawn
    if args.verbose:
        for cell, count in drawn.items():
            logger.info("  %-32s %d", cell, count)

    dataset: dict[str, Any] = {
        "source": source.value,
        "file_digest": _sha256_file(args.input),
        "loaded": report.loaded,
        "rejected": report.rejected_total,
        "malformed": len(report.malformed),
    }
    if source is Source.SQUAD2:
        dataset["k"] = settings.squad_distractors if args.k is None else args.k
    manifest = RunManifest(
        command="prepare",
        dataset=dataset,
        sampling=sampling,
        bm25=bm25_settings() if source is Source.SQUAD2 else {},
        execution={"load_report": report.to_dict()},
    )

    out_dir = Path(args.workdir) / f"prepare-{manifest.short_digest}"
    write_instances(out_dir / INSTANCES_FILE, instances)
    write_sample_manifest(out_dir / SAMPLE_FILE, sample)
    manifest.write(out_dir / MANIFEST_FILE)
    logger.info(
        "Prepared %d instances and %d sampled pairs (%d rejected, %d malformed).",
        len(instances),
        len(sample),
        report.rejected_total,
        len(report.malformed),
    )
    print(out_dir)
    return out_dir


def _client(args: argparse.Namespace) -> CompletionClient:
    if args.replay and args.record:
        msg = "--replay and --record are mutually exclusive."
        raise UsageError(msg)
    if args.replay:
        mode, store_path = ClientMode.REPLAY, args.replay
    elif args.record:
        mode, store_path = ClientMode.RECORD, args.record
    else:
        mode, store_path = ClientMode.LIVE, None

    strict = not args.no_strict
    backend = None if mode is ClientMode.REPLAY and strict else make_backend(args.provider, base_url=args.base_url)
    return CompletionClient(
        backend,
        model_id=args.model,
        store=ReplayStore(store_path) if store_path else None,
        mode=mode,
        strict=strict,
        temperature=args.temperature,
        max_output_tokens=args.max_output_tokens,
        max_retries=args.max_retries,
        max_in_flight=args.max_in_flight,
    )


def cmd_run(args: argparse.Namespace) -> Path:
    """Judge every sampled pair of a prepared directory. Reruns skip pairs already judged."""
    _require(args, "prepared", "strategy", "model")
    prepared = Path(args.prepared)
    prepare_manifest, instances, sample = _load_prepared(prepared)
    try:
        config = StrategyConfig(
            strategy=args.strategy,
            prompt_variant=args.variant,
            care_list_len=args.n,
            matcher_mode=args.matcher,
            unparseable_policy=args.unparseable,
        )
        client = _client(args)
    except PromptError:
        raise
    except ValueError as e:
        raise UsageError(str(e)) from e
    label = args.label or config.label
    template = load_template(config.strategy, config.prompt_variant)

    manifest = RunManifest(
        command="run",
        dataset=prepare_manifest.dataset,
        sampling=prepare_manifest.sampling,
        strategy={**config.to_dict(), "label": label, "template": template.name},
        transport={
            "model_id": client.model_id,
            "provider": args.provider,
            "temperature": client.temperature,
            "max_output_tokens": client.max_output_tokens,
            "max_retries": client.max_retries,
            "backoff_base": client.backoff_base,
            "backoff_cap": client.backoff_cap,
        },
        templates=template_digests(),
        bm25=prepare_manifest.bm25,
        inputs={
            "prepare_manifest": prepare_manifest.digest,
            "instances": _sha256_file(prepared / INSTANCES_FILE),
            "sample": _sha256_file(prepared / SAMPLE_FILE),
        },
        execution={
            "mode": client.mode.value,
            "store": args.replay or args.record,
            "strict": client.strict,
            "max_in_flight": client.max_in_flight,
        },
    )
    run_dir = prepared / "runs" / f"{label}-{manifest.short_digest}"
    manifest.write(run_dir / MANIFEST_FILE)

    verdicts_path = run_dir / VERDICTS_FILE
    done = {verdict.key for verdict in resume_verdicts(verdicts_path)}
    try:
        judge_all(
            client,
            config,
            sample,
            skip=done,
            on_verdict=lambda verdict: _append_jsonl(verdicts_path, verdict.to_dict()),
            verbose=args.verbose,
        )
    finally:
        logger.info("%s: %d network calls.", label, client.network_calls)

    verdicts = read_verdicts(verdicts_path) if verdicts_path.exists() else []
    write_verdicts(verdicts_path, verdicts)
    if config.strategy is Strategy.INDIRECT:
        write_review(run_dir / REVIEW_FILE, verdicts, instances)
    print(run_dir)
    return run_dir


def _manifest_path(out: Path) -> Path:
    """'score.json' -> 'score.manifest.json', next to the output it describes."""
    return out.with_name(f"{out.name.split('.')[0]}.manifest.json")


def cmd_score(args: argparse.Namespace) -> Path:
    """Confusion matrix and metrics of one verdict file, written next to it with a manifest."""
    _require(args, "verdicts")
    prepared = _infer_prepared(args, args.verdicts)
    _, instances, _ = _load_prepared(prepared)
    verdicts = read_verdicts(args.verdicts)
    cm = confusion(verdicts, gold_map(instances))
    manifest = RunManifest(
        command="score",
        stats={"metrics": [which.value for which in METRICS]},
        inputs={"verdicts": _sha256_file(args.verdicts), "instances": _sha256_file(prepared / INSTANCES_FILE)},
    )
    result = {
        "manifest": manifest.digest,
        "verdicts": manifest.inputs["verdicts"],
        "confusion": cm.to_dict(),
        "metrics": {which.value: metric(cm, which) for which in METRICS},
        "flags": metric_flags(cm),
    }
    out = Path(args.out) if args.out else Path(args.verdicts).with_name(SCORE_FILE)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8", newline="\n") as file:
        file.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    manifest.write(_manifest_path(out))

    decimals = settings.display_decimals
    print(f"tp={cm.tp} fp={cm.fp} tn={cm.tn} fn={cm.fn} excluded={cm.excluded}")
    for name, value in result["metrics"].items():
        print(f"{name:<10}{value:.{decimals}f}")
    print(out)
    return out


def cmd_compare(args: argparse.Namespace) -> Path:
    """Paired permutation tests between two verdict files, written next to the first one with a manifest."""
    _require(args, "a", "b")
    prepared = _infer_prepared(args, args.a)
    _, instances, _ = _load_prepared(prepared)
    gold = gold_map(instances)
    verdicts_a = read_verdicts(args.a)
    verdicts_b = read_verdicts(args.b)
    metrics = [Metric(which) for which in args.metric or [Metric.F1.value]]
    permutations = settings.permutations if args.perms is None else args.perms
    seed = settings.seed if args.seed is None else args.seed
    alpha = settings.alpha if args.alpha is None else args.alpha
    manifest = RunManifest(
        command="compare",
        stats={
            "permutations": permutations,
            "seed": seed,
            "alpha": alpha,
            "metrics": [which.value for which in metrics],
        },
        inputs={
            "a": _sha256_file(args.a),
            "b": _sha256_file(args.b),
            "instances": _sha256_file(prepared / INSTANCES_FILE),
        },
    )

    rows = []
    for which in metrics:
        result = permutation_test(verdicts_a, verdicts_b, gold, which, permutations, seed, alpha)
        rows.append({"a": manifest.inputs["a"], "b": manifest.inputs["b"], **result.to_dict()})
        marker = "*" if result.significant else ""
        print(f"{result.metric:<10}diff={result.observed_diff:+.4f}  p={result.p_value:.4f}{marker}")
    out = Path(args.out) if args.out else Path(args.a).parent / f"compare-{manifest.short_digest}.jsonl"
    _write_jsonl(out, rows)
    manifest.write(_manifest_path(out))
    print(out)
    return out


def _verdict_sets(specs: Sequence[str]) -> tuple[dict[str, list[JudgeVerdict]], dict[str, str]]:
    sets: dict[str, list[JudgeVerdict]] = {}
    paths: dict[str, str] = {}
    for spec in specs:
        label, sep, path = spec.partition("=")
        if not sep:
            path = spec
            verdicts = read_verdicts(path)
            labels = sorted({verdict.strategy for verdict in verdicts})
            label = labels[0] if len(labels) == 1 else Path(path).parent.name
        else:
            verdicts = read_verdicts(path)
        if label in sets:
            msg = f"Label {label!r} is used twice; name the sets with LABEL=PATH."
            raise UsageError(msg)
        sets[label] = verdicts
        paths[label] = path
    return sets, paths


def cmd_report(args: argparse.Namespace) -> Path:
    """Tables of metrics with intervals and significance, plus prompt lengths."""
    _require(args, "verdicts")
    sets, paths = _verdict_sets(args.verdicts)
    prepared = _infer_prepared(args, next(iter(paths.values())))
    _, instances, _ = _load_prepared(prepared)
    try:
        strata = [parse_strata(spec) for spec in args.strata or ()]
    except ValueError as e:
        raise UsageError(str(e)) from e
    metrics = [Metric(which) for which in args.metric or METRICS]
    try:
        stats_cfg = BootstrapConfig(
            resamples=args.resamples, resample_size=args.resample_size, alpha=args.alpha, seed=args.seed
        )
    except ValueError as e:
        raise UsageError(str(e)) from e
    if args.baseline is not None and args.baseline not in sets:
        msg = f"Baseline {args.baseline!r} is not one of {sorted(sets)}."
        raise UsageError(msg)
    formats = [OutputFormat(fmt) for fmt in args.format or [fmt.value for fmt in OutputFormat]]
    permutations = settings.permutations if args.perms is None else args.perms

    manifest = RunManifest(
        command="report",
        stats={
            **stats_cfg.to_dict(),
            "permutations": permutations,
            "baseline": args.baseline,
            "reference": args.reference,
            "strata": [list(dims) for dims in strata],
            "metrics": [which.value for which in metrics],
        },
        inputs={label: _sha256_file(path) for label, path in sorted(paths.items())},
    )
    out_dir = Path(args.workdir or prepared / "reports") / f"report-{manifest.short_digest}"

    reports = build_report(
        sets,
        gold_map(instances),
        instances,
        strata,
        stats_cfg,
        metrics=metrics,
        baseline=args.baseline,
        permutations=permutations,
    )
    for fmt in formats:
        emit(reports, out_dir / f"report{FILE_SUFFIXES[fmt]}", fmt)
    lengths = format_prompt_lengths(prompt_length_summary(sets, reference=args.reference))
    (out_dir / "prompt_lengths.txt").write_text(lengths, encoding="utf-8")
    manifest.write(out_dir / MANIFEST_FILE)

    print(format_table(reports, metrics), end="")
    print(lengths, end="")
    print(out_dir)
    return out_dir


def cmd_import_verdicts(args: argparse.Namespace) -> Path:
    """Convert an external delimited label file into a verdict file."""
    _require(args, "input", "out")
    verdicts = import_verdicts(args.input, strategy=args.strategy, model_id=args.model, delimiter=args.delimiter)
    path = write_verdicts(args.out, verdicts)
    logger.info("Imported %d verdicts into %s.", len(verdicts), path)
    return path


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults, keyed by option name.")
    common.add_argument("--verbose", action="store_true", help="Show progress bars and load reports.")
    common.add_argument("--debug", action="store_true", help="Log HTTP request and response bodies.")
    return common


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    """Build the argument parser and return it with its subcommand parsers."""
    common = _common_options()
    parser = argparse.ArgumentParser(prog="relevatr", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, argparse.ArgumentParser] = {}

    prepare = subparsers.add_parser("prepare", parents=[common], help="Load a dataset and draw the sample.")
    prepare.add_argument("--source", choices=[source.value for source in Source])
    prepare.add_argument("--input", help="Dataset file, one record per line.")
    prepare.add_argument(
        "--plan",
        default=None,
        help=f"One of {', '.join(PLANS)}, or a plan JSON file. Default: replication for hotpotqa, labeled otherwise.",
    )
    prepare.add_argument("--seed", type=int, default=None, help="Sampling seed.")
    prepare.add_argument("--per-cell", type=int, default=None, help="Pairs per cell of the replication plan.")
    prepare.add_argument("--per-label", type=int, default=None, help="Pairs per label of the balanced plan.")
    prepare.add_argument("--k", type=int, default=None, help="BM25 distractors per SQuAD question.")
    prepare.add_argument("--workdir", default="runs", help="Root folder of prepared directories.")
    prepare.set_defaults(handler=cmd_prepare)
    commands["prepare"] = prepare

    run = subparsers.add_parser("run", parents=[common], help="Judge the sampled pairs.")
    run.add_argument("--prepared", help="Directory written by prepare.")
    run.add_argument("--strategy", choices=[strategy.value for strategy in Strategy])
    run.add_argument("--variant", default=PromptVariant.STANDARD.value, choices=[v.value for v in PromptVariant])
    run.add_argument("--n", type=int, default=None, help="CARE list length.")
    run.add_argument("--model", help="Model id sent to the provider.")
    run.add_argument("--provider", default="openai", choices=sorted(BACKENDS))
    run.add_argument("--base-url", default=None)
    run.add_argument("--label", default=None, help="Run label, by default derived from strategy, n and variant.")
    run.add_argument("--replay", default=None, help="Replay store to answer from.")
    run.add_argument("--record", default=None, help="Replay store to record into.")
    run.add_argument("--no-strict", action="store_true", help="Call the provider on replay misses.")
    run.add_argument("--matcher", default=MatcherMode.NORMALIZED.value, choices=[m.value for m in MatcherMode])
    run.add_argument(
        "--unparseable",
        default=UnparseablePolicy.RETRY_ONCE_THEN_NONRELEVANT.value,
        choices=[policy.value for policy in UnparseablePolicy],
    )
    run.add_argument("--temperature", type=float, default=None)
    run.add_argument("--max-output-tokens", type=int, default=None)
    run.add_argument("--max-retries", type=int, default=None)
    run.add_argument("--max-in-flight", type=int, default=None)
    run.set_defaults(handler=cmd_run)
    commands["run"] = run

    score = subparsers.add_parser("score", parents=[common], help="Score one verdict file.")
    score.add_argument("--verdicts")
    score.add_argument("--prepared", default=None)
    score.add_argument("--out", default=None)
    score.set_defaults(handler=cmd_score)
    commands["score"] = score

    compare = subparsers.add_parser("compare", parents=[common], help="Paired permutation test of two verdict files.")
    compare.add_argument("--a")
    compare.add_argument("--b")
    compare.add_argument("--prepared", default=None)
    compare.add_argument("--metric", action="append", choices=[which.value for which in Metric])
    compare.add_argument("--perms", type=int, default=None)
    compare.add_argument("--seed", type=int, default=None)
    compare.add_argument("--alpha", type=float, default=None)
    compare.add_argument("--out", default=None)
    compare.set_defaults(handler=cmd_compare)
    commands["compare"] = compare

    report = subparsers.add_parser("report", parents=[common], help="Build report tables.")
    report.add_argument("--verdicts", action="append", help="Verdict file, optionally as LABEL=PATH. Repeatable.")
    report.add_argument("--prepared", default=None)
    report.add_argument("--strata", action="append", help="Grouping such as 'level' or 'level,type'. Repeatable.")
    report.add_argument("--baseline", default=None, help="Label of the baseline set.")
    report.add_argument("--reference", default="direct", help="Label prompt lengths are compared to.")
    report.add_argument("--metric", action="append", choices=[which.value for which in Metric])
    report.add_argument("--resamples", type=int, default=None)
    report.add_argument("--resample-size", type=int, default=None)
    report.add_argument("--seed", type=int, default=None)
    report.add_argument("--alpha", type=float, default=None)
    report.add_argument("--perms", type=int, default=None)
    report.add_argument("--format", action="append", choices=[fmt.value for fmt in OutputFormat])
    report.add_argument("--workdir", default=None, help="Root folder of report directories.")
    report.set_defaults(handler=cmd_report)
    commands["report"] = report

    importer = subparsers.add_parser("import-verdicts", parents=[common], help="Import external labels.")
    importer.add_argument("--input")
    importer.add_argument("--out")
    importer.add_argument("--strategy", default=None)
    importer.add_argument("--model", default=None)
    importer.add_argument("--delimiter", default=None)
    importer.set_defaults(handler=cmd_import_verdicts)
    commands["import-verdicts"] = importer

    return parser, commands


def _apply_config(argv: Sequence[str], commands: dict[str, argparse.ArgumentParser]) -> None:
    """
    Load --config and install its values as subcommand defaults, so explicit flags still win.

    Top-level keys apply to every subcommand that has the option; a key named after a subcommand holds values for
    that subcommand only.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with Path(known.config).open(encoding="utf-8") as file:
            config = json.load(file)
    except (OSError, json.JSONDecodeError) as e:
        msg = f"Cannot read config file {known.config}: {e}"
        raise UsageError(msg) from e
    if not isinstance(config, dict):
        msg = f"Config file {known.config} must hold a JSON object."
        raise UsageError(msg)

    for name, subparser in commands.items():
        actions = {action.dest: action for action in subparser._actions}  # noqa: SLF001
        values = {key.replace("-", "_"): value for key, value in config.items() if not isinstance(value, dict)}
        values.update({key.replace("-", "_"): value for key, value in config.get(name, {}).items()})
        values = {key: value for key, value in values.items() if key in actions}
        for key, value in values.items():
            choices = actions[key].choices
            given = value if isinstance(value, list) else [value]
            invalid = [item for item in given if choices is not None and item not in choices]
            if invalid:
                msg = f"Config file {known.config}: {name} option {key}={value!r} is not one of {list(choices)}."
                raise UsageError(msg)
        subparser.set_defaults(**values)


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line.

    Returns:
        int: 0 on success, 2 on input errors, 3 when the transport gives up, 4 on any other failure.

    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, commands = build_parser()
    try:
        _apply_config(argv, commands)
    except UsageError as e:
        logger.error("%s", e)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    args = parser.parse_args(argv)
    if args.debug:
        logging.getLogger("relevatr").setLevel(logging.DEBUG)

    handler: Callable[[argparse.Namespace], Any] = args.handler
    try:
        handler(args)
    except INPUT_ERRORS as e:
        logger.error("%s: %s", args.command, e)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    except TransportError as e:
        logger.error("%s: %s", args.command, e)  # noqa: TRY400
        return EXIT_TRANSPORT_ERROR
    except Exception:
        logger.exception("%s failed unexpectedly.", args.command)
        return EXIT_INTERNAL_ERROR
    return EXIT_OK
