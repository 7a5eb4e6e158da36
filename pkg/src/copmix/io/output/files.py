"""CSV and JSON writers with lossless float text.

Floats are written with ``repr``, the shortest string that parses back to the
same double, so re-running a command produces byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO, Union

import numpy as np

PathLike = Union[str, Path]


def format_float(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    number = float(value)
    if math.isnan(number):
        return "nan"
    return repr(number)


def _prepare(path: PathLike) -> Path:
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    return target


def write_csv_stream(
    stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_float(v) for v in row])
        count += 1
    return count


def write_csv(
    path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> int:
    """Write ``rows`` under ``header``; returns the number of data rows."""
    with open(_prepare(path), "w", encoding="utf-8", newline="") as f:
        return write_csv_stream(f, header, rows)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def dumps_json(document: Any) -> str:
    """Sorted, indented JSON with non-finite floats written as null."""
    return json.dumps(_jsonable(document), indent=2, sort_keys=True, allow_nan=False)


def write_json(path: PathLike, document: Any) -> None:
    _prepare(path).write_text(dumps_json(document) + "\n", encoding="utf-8")
