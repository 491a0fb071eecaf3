# Copyright (c) 2026 The relevatr authors
"""Utility functions for line-delimited files and content digests."""

import hashlib
import json
from collections.abc import Iterable, Iterator
from pathlib import Path
from typing import Any

from .exceptions import ArtifactError


CHUNCK_SIZE = 8192


def _sha256_text(text: str) -> str:
    """
    Compute the hex SHA-256 digest of a string.

    Args:
        text (str): The text to hash, encoded as UTF-8.

    Returns:
        str: The hex digest.

    """
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _sha256_file(path: str | Path) -> str:
    """
    Compute the hex SHA-256 digest of a file.

    Args:
        path (str | Path): Path to the file.

    Returns:
        str: The hex digest of the file bytes.

    """
    digest = hashlib.sha256()
    with Path(path).open("rb") as file:
        for chunk in iter(lambda: file.read(CHUNCK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _dumps(obj: Any) -> str:  # noqa: ANN401
    """Serialize an object to a canonical single-line JSON string."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _digest_obj(obj: Any) -> str:  # noqa: ANN401
    """Digest of the canonical JSON form of an object."""
    return _sha256_text(_dumps(obj))


def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict[str, Any] | None, str | None]]:
    """
    Iterate over the records of a line-delimited JSON file.

    Blank lines are skipped. Lines that are not JSON objects are yielded with an error message instead of a record,
    so callers decide whether to skip or abort.

    Args:
        path (str | Path): Path to the file.

    Yields:
        tuple[int, dict | None, str | None]: The 1-based line number, the parsed record (or None) and the parse error
            (or None).

    Raises:
        OSError: If the file cannot be read.

    """
    with Path(path).open(encoding="utf-8") as file:
        for line_number, line in enumerate(file, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                yield line_number, None, f"invalid JSON: {e.msg}"
                continue
            if not isinstance(record, dict):
                yield line_number, None, "record is not an object"
                continue
            yield line_number, record, None


def _read_jsonl(path: str | Path) -> list[dict[str, Any]]:
    """
    Read a line-delimited JSON file written by this package.

    Args:
        path (str | Path): Path to the file.

    Returns:
        list[dict]: The records in file order.

    Raises:
        ArtifactError: If a line is not a JSON object.

    """
    records = []
    for line_number, record, error in _iter_jsonl(path):
        if record is None:
            msg = f"{path}:{line_number}: {error}"
            raise ArtifactError(msg)
        records.append(record)
    return records


def _write_jsonl(path: str | Path, records: Iterable[Any]) -> Path:
    """
    Write records as canonical line-delimited JSON, creating parent folders as needed.

    Args:
        path (str | Path): Destination file.
        records (Iterable): JSON-serializable records.

    Returns:
        Path: The written path.

    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as file:
        file.writelines(_dumps(record) + "\n" for record in records)
    return path


def _append_jsonl(path: str | Path, record: Any) -> None:  # noqa: ANN401
    """Append a single record to a line-delimited JSON file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", encoding="utf-8", newline="\n") as file:
        file.write(_dumps(record) + "\n")
