# Copyright (c) 2026 The relevatr authors
"""Versioned prompt templates with named placeholders."""

import logging
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import cache
from importlib.resources import files

from .datasets import ContextDoc
from .exceptions import PromptError, UnknownVariantError
from .utils import _sha256_text


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

PLACEHOLDER_PATTERN = re.compile(r"\{\{(\w+)\}\}")
PLACEHOLDERS = frozenset({"question", "answer", "context", "context_list"})
EMPTY_LIST = "(no documents)"


class Strategy(str, Enum):
    """Evaluation strategy."""

    INDIRECT = "indirect"
    DIRECT = "direct"
    CARE = "care"


class PromptVariant(str, Enum):
    """Prompting technique applied to a strategy's template."""

    STANDARD = "standard"
    SINGLE_SHOT = "single_shot"
    FEW_SHOT = "few_shot"
    ROLE = "role"
    SHORT = "short"
    COT = "cot"
    NO_ANSWER = "no_answer"


_ALL_VARIANTS = tuple(PromptVariant)

SUPPORTED_VARIANTS: dict[Strategy, tuple[PromptVariant, ...]] = {
    Strategy.DIRECT: _ALL_VARIANTS,
    Strategy.CARE: _ALL_VARIANTS,
    Strategy.INDIRECT: (PromptVariant.STANDARD, PromptVariant.SHORT, PromptVariant.ROLE),
}

REQUIRED_PLACEHOLDERS: dict[Strategy, frozenset[str]] = {
    Strategy.INDIRECT: frozenset({"question", "context"}),
    Strategy.DIRECT: frozenset({"question", "answer", "context"}),
    Strategy.CARE: frozenset({"question", "answer", "context", "context_list"}),
}


@dataclass(frozen=True)
class Template:
    """A template file and its content digest."""

    name: str
    text: str

    @property
    def digest(self) -> str:
        """SHA-256 of the template text."""
        return _sha256_text(self.text)

    @property
    def placeholders(self) -> frozenset[str]:
        """Placeholder names used by the template."""
        return frozenset(PLACEHOLDER_PATTERN.findall(self.text))


@cache
def load_template(strategy: Strategy | str, variant: PromptVariant | str) -> Template:
    """
    Load the shipped template for a strategy and prompt variant.

    Args:
        strategy (Strategy | str): indirect, direct or care.
        variant (PromptVariant | str): The prompt variant.

    Returns:
        Template: The template.

    Raises:
        UnknownVariantError: If the strategy does not support the variant.
        PromptError: If the template uses unknown placeholders or lacks required ones.

    """
    try:
        strategy = Strategy(strategy)
        variant = PromptVariant(variant)
    except ValueError as e:
        raise UnknownVariantError(str(e)) from e
    if variant not in SUPPORTED_VARIANTS[strategy]:
        supported = ", ".join(v.value for v in SUPPORTED_VARIANTS[strategy])
        msg = f"Strategy {strategy.value!r} has no {variant.value!r} variant. Supported: {supported}."
        raise UnknownVariantError(msg)

    name = f"{strategy.value}_{variant.value}"
    text = (files("relevatr") / "templates" / f"{name}.txt").read_text(encoding="utf-8")
    template = Template(name=name, text=text)

    required = set(REQUIRED_PLACEHOLDERS[strategy])
    if variant is PromptVariant.NO_ANSWER:
        required.discard("answer")
    unknown = template.placeholders - PLACEHOLDERS
    missing = required - template.placeholders
    if unknown or missing:
        msg = f"Template {name} is invalid: unknown placeholders {sorted(unknown)}, missing {sorted(missing)}."
        raise PromptError(msg)
    if variant is PromptVariant.NO_ANSWER and "answer" in template.placeholders:
        msg = f"Template {name} must not reference the answer."
        raise PromptError(msg)
    return template


def template_digests() -> dict[str, str]:
    """Digest of every shipped template, keyed by template name."""
    digests = {}
    for strategy, variants in SUPPORTED_VARIANTS.items():
        for variant in variants:
            template = load_template(strategy, variant)
            digests[template.name] = template.digest
    return dict(sorted(digests.items()))


def format_context(doc: ContextDoc) -> str:
    """Render a context as 'Title: text', or just the text when it has no title."""
    return f"{doc.title}: {doc.text}" if doc.title else doc.text


def format_context_list(docs: Sequence[ContextDoc]) -> str:
    """
    Render a list view with 1-based ordinal ids.

    Args:
        docs (Sequence[ContextDoc]): Contexts in retrieval order.

    Returns:
        str: One '[i] Title: text' line per context, or an explicit empty marker.

    Examples:
    >>> format_context_list([])
    '(no documents)'

    """
    if not docs:
        return EMPTY_LIST
    return "\n".join(f"[{position}] {format_context(doc)}" for position, doc in enumerate(docs, start=1))


def render(template: Template, values: Mapping[str, str]) -> str:
    """
    Expand every placeholder of a template in a single pass.

    Values are inserted verbatim and never re-expanded, so question or context text that happens to contain
    '{{...}}' is left as is.

    Args:
        template (Template): The template.
        values (Mapping[str, str]): Replacement text per placeholder name.

    Returns:
        str: The prompt.

    Raises:
        PromptError: If the template uses a placeholder with no value.

    """
    missing = template.placeholders - values.keys()
    if missing:
        msg = f"Template {template.name} has unresolved placeholders: {sorted(missing)}."
        raise PromptError(msg)
    return PLACEHOLDER_PATTERN.sub(lambda match: values[match.group(1)], template.text)
