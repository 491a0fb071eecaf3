# Copyright (c) 2026 The relevatr authors
"""Run manifests: the frozen configuration that identifies and reproduces every artifact."""

import json
import logging
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

from . import settings
from .utils import _digest_obj


logging.basicConfig(level=logging.INFO, format="%(message)s")
logger = logging.getLogger(__name__)

DIGEST_PREFIX_LEN = 12


def tool_version() -> str:
    """Installed relevatr version, or '0+unknown' when running from a source tree."""
    try:
        return version("relevatr")
    except PackageNotFoundError:
        return "0+unknown"


def bm25_settings() -> dict[str, Any]:
    """BM25 settings echoed in manifests."""
    return {
        "k1": settings.bm25_k1,
        "b": settings.bm25_b,
        "stemming": settings.bm25_stemming,
        "stopwords": settings.bm25_stopwords,
        "index_text": "title+text",
    }


@dataclass
class RunManifest:
    """
    Everything that influences the output of a command.

    `execution` records how the command ran (replay store path, verbosity, worker count) and is left out of the
    digest, so replaying a recorded run lands in the same run directory. The manifest holds no timestamps.
    """

    command: str
    tool_version: str = field(default_factory=tool_version)
    dataset: dict[str, Any] = field(default_factory=dict)
    sampling: dict[str, Any] = field(default_factory=dict)
    strategy: dict[str, Any] = field(default_factory=dict)
    transport: dict[str, Any] = field(default_factory=dict)
    templates: dict[str, str] = field(default_factory=dict)
    stats: dict[str, Any] = field(default_factory=dict)
    bm25: dict[str, Any] = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    execution: dict[str, Any] = field(default_factory=dict)

    def identity(self) -> dict[str, Any]:
        """The digested part of the manifest."""
        data = asdict(self)
        data.pop("execution")
        return data

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of identity()."""
        return _digest_obj(self.identity())

    @property
    def short_digest(self) -> str:
        """First characters of the digest, used in run directory names."""
        return self.digest[:DIGEST_PREFIX_LEN]

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-ready dict, digest included."""
        return {**asdict(self), "digest": self.digest}

    def write(self, path: str | Path) -> Path:
        """Write the manifest as indented, key-sorted JSON."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as file:
            file.write(json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        return path

    @classmethod
    def read(cls, path: str | Path) -> "RunManifest":
        """
        Read a manifest written by write().

        Raises:
            ValueError: If the stored digest does not match the content.

        """
        with Path(path).open(encoding="utf-8") as file:
            data = json.load(file)
        stored = data.pop("digest", None)
        manifest = cls(**data)
        if stored is not None and stored != manifest.digest:
            msg = f"Manifest {path} was modified: digest {stored[:DIGEST_PREFIX_LEN]} does not match its content."
            raise ValueError(msg)
        return manifest
