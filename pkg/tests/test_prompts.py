# Copyright (c) 2026 The relevatr authors
"""Tests for prompt templates and rendering."""

import pytest

from relevatr.datasets import ContextDoc
from relevatr.exceptions import PromptError, UnknownVariantError
from relevatr.prompts import (
    EMPTY_LIST,
    SUPPORTED_VARIANTS,
    PromptVariant,
    Strategy,
    Template,
    format_context,
    format_context_list,
    load_template,
    render,
    template_digests,
)


ALL_TEMPLATES = [(strategy, variant) for strategy, variants in SUPPORTED_VARIANTS.items() for variant in variants]


# Test cases for load_template


@pytest.mark.parametrize(("strategy", "variant"), ALL_TEMPLATES)
def test_shipped_templates_are_valid(strategy: Strategy, variant: PromptVariant) -> None:
    """Test that every supported template loads and uses only known placeholders."""
    template = load_template(strategy, variant)
    assert template.name == f"{strategy.value}_{variant.value}"
    assert "question" in template.placeholders
    assert "context" in template.placeholders
    assert ("context_list" in template.placeholders) == (strategy is Strategy.CARE)
    if variant is PromptVariant.NO_ANSWER or strategy is Strategy.INDIRECT:
        assert "answer" not in template.placeholders
    else:
        assert "answer" in template.placeholders


def test_cot_templates_ask_for_a_verdict_line() -> None:
    """Test that chain-of-thought templates request the VERDICT marker."""
    for strategy in (Strategy.DIRECT, Strategy.CARE):
        assert "VERDICT:" in load_template(strategy, PromptVariant.COT).text


@pytest.mark.parametrize("strategy", [Strategy.DIRECT, Strategy.CARE])
def test_cot_prompts_carry_worked_examples(strategy: Strategy) -> None:
    """Test that rendered chain-of-thought prompts show worked examples before the instruction."""
    values = {"question": "Q?", "answer": "A", "context": "Doc.", "context_list": "[1] Doc."}
    prompt = render(load_template(strategy, PromptVariant.COT), values)
    for example in ("The Four Seasons", "Spring (season)", "Fusajiro Yamauchi"):
        assert example in prompt
    assert prompt.count("Reasoning:") == 3  # noqa: PLR2004
    assert prompt.index("Fusajiro Yamauchi") < prompt.index("Question: Q?") < prompt.index("Think step by step")


def test_indirect_template_asks_for_sentinel() -> None:
    """Test that indirect templates name the unanswerable sentinel."""
    for variant in SUPPORTED_VARIANTS[Strategy.INDIRECT]:
        assert "UNANSWERABLE" in load_template(Strategy.INDIRECT, variant).text


@pytest.mark.parametrize(
    ("strategy", "variant"),
    [
        ("indirect", "cot"),
        ("indirect", "no_answer"),
        ("direct", "bogus"),
        ("nonsense", "standard"),
    ],
)
def test_unknown_variants(strategy: str, variant: str) -> None:
    """Test that unsupported (strategy, variant) pairs are rejected."""
    with pytest.raises(UnknownVariantError):
        load_template(strategy, variant)


def test_template_digests() -> None:
    """Test that every shipped template has a distinct SHA-256 digest."""
    digests = template_digests()
    assert len(digests) == len(ALL_TEMPLATES)
    assert all(len(digest) == 64 for digest in digests.values())  # noqa: PLR2004
    assert len(set(digests.values())) == len(digests)


# Test cases for rendering


def test_render_is_single_pass() -> None:
    """Test that inserted text containing placeholders is not expanded again."""
    template = Template(name="t", text="Q: {{question}} C: {{context}}")
    prompt = render(template, {"question": "What is {{context}}?", "context": "text"})
    assert prompt == "Q: What is {{context}}? C: text"


def test_render_missing_value() -> None:
    """Test that an unresolved placeholder is an error."""
    template = Template(name="t", text="{{question}} {{answer}}")
    with pytest.raises(PromptError, match="unresolved placeholders"):
        render(template, {"question": "q"})


def test_format_context() -> None:
    """Test the rendering of titled and untitled contexts."""
    assert format_context(ContextDoc("d", "Some text.", title="Title")) == "Title: Some text."
    assert format_context(ContextDoc("d", "Some text.")) == "Some text."


def test_format_context_list() -> None:
    """Test ordinal ids and the empty marker."""
    docs = [ContextDoc("x", "First.", title="A"), ContextDoc("y", "Second.")]
    assert format_context_list(docs) == "[1] A: First.\n[2] Second."
    assert format_context_list([]) == EMPTY_LIST
