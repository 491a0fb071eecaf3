# Copyright (c) 2026 The relevatr authors
"""relevatr - Reproducible evaluation of LLM relevance judges on QA datasets."""

__author__ = "The relevatr authors"
__license__ = "MIT"
__description__ = "Reproducible evaluation of LLM relevance judges on QA datasets."


from importlib.metadata import version

from . import settings
from .bm25 import Bm25Index, tokenize
from .datasets import (
    ContextDoc,
    EvalInstance,
    GoldLabel,
    SamplingPlan,
    Source,
    load_dataset,
    stratified_sample,
)
from .judging import JudgeVerdict, StrategyConfig, judge, judge_all, parse_verdict
from .metrics import ConfusionMatrix, Metric, confusion, metric
from .reporting import MetricReport, build_report, emit
from .stats import BootstrapConfig, bootstrap_ci, permutation_test
from .transport import ClientMode, CompletionClient, ReplayStore


__version__ = version(__name__)

__all__ = [
    "Bm25Index",
    "BootstrapConfig",
    "ClientMode",
    "CompletionClient",
    "ConfusionMatrix",
    "ContextDoc",
    "EvalInstance",
    "GoldLabel",
    "JudgeVerdict",
    "Metric",
    "MetricReport",
    "ReplayStore",
    "SamplingPlan",
    "Source",
    "StrategyConfig",
    "bootstrap_ci",
    "build_report",
    "confusion",
    "emit",
    "judge",
    "judge_all",
    "load_dataset",
    "metric",
    "parse_verdict",
    "permutation_test",
    "settings",
    "stratified_sample",
    "tokenize",
]
