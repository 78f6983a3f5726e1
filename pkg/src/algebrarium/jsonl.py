"""JSONL readers and writers for the task, chain, response and estimate files."""

from __future__ import annotations

import json
from typing import Callable, Iterable, Iterator

from .errors import AlgebrariumError, DataFormatError


def iter_jsonl(path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, object)``; blank lines are skipped."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON ({exc.msg})", path, lineno) from None
            if not isinstance(obj, dict):
                raise DataFormatError("expected a JSON object", path, lineno)
            yield lineno, obj


def load_jsonl(path, convert: Callable[[dict], object]) -> list:
    """Read every record through ``convert``, tagging failures with the line number."""
    out = []
    for lineno, obj in iter_jsonl(path):
        try:
            out.append(convert(obj))
        except (KeyError, TypeError, ValueError, AlgebrariumError) as exc:
            if isinstance(exc, DataFormatError):
                raise
            detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
            raise DataFormatError(f"bad record: {detail}", path, lineno) from None
    return out


def dumps_jsonl(rows: Iterable[dict]) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)


def write_jsonl(path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_jsonl(rows))
