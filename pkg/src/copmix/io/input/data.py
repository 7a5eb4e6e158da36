"""Numeric CSV input: one observation per row, optional single header line."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ...core.errors import DimensionError, ValidationError


def _parse_row(row: list[str]) -> Optional[list[float]]:
    try:
        return [float(cell) for cell in row]
    except ValueError:
        return None


def read_matrix(path: Union[str, Path]) -> tuple[np.ndarray, Optional[list[str]]]:
    """Read an ``n x M`` float matrix and its header, if the first row is one."""
    source = Path(path)
    try:
        with open(source, encoding="utf-8", newline="") as f:
            rows = [
                [cell.strip() for cell in row]
                for row in csv.reader(f)
                if row and any(cell.strip() for cell in row)
            ]
    except OSError as exc:
        raise ValidationError(f"cannot read {source}: {exc}") from exc
    if not rows:
        raise ValidationError(f"{source} contains no rows")
    header: Optional[list[str]] = None
    if _parse_row(rows[0]) is None:
        header, rows = rows[0], rows[1:]
    width = len(header) if header else len(rows[0]) if rows else 0
    values: list[list[float]] = []
    for line_no, row in enumerate(rows, start=2 if header else 1):
        if len(row) != width:
            raise DimensionError(
                f"{source}: row {line_no} has {len(row)} fields, expected {width}"
            )
        parsed = _parse_row(row)
        if parsed is None:
            raise ValidationError(f"{source}: row {line_no} is not numeric")
        values.append(parsed)
    if not values:
        raise ValidationError(f"{source} contains a header but no data")
    matrix = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{source} contains non-finite values")
    return matrix, header
