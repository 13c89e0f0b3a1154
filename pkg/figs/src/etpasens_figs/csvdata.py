"""CSV ingestion for the figure scripts.

These scripts are pure CSV-to-image transforms: all physics lives in the
CSV files produced by the etpasens CLI, and nothing is recomputed here.
"""

from __future__ import annotations

import csv


class FigureDataError(ValueError):
    """Raised for empty inputs or inputs missing required columns."""


def read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    """Rows of a CSV report, validated against the required column names."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise FigureDataError(f"{path}: empty CSV (no header row)")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise FigureDataError(f"{path}: missing columns: {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise FigureDataError(f"{path}: no data rows")
    return rows


def as_float(row: dict, column: str, path: str) -> float:
    try:
        return float(row[column])
    except (TypeError, ValueError):
        raise FigureDataError(
            f"{path}: non-numeric value {row.get(column)!r} in column {column!r}"
        ) from None
