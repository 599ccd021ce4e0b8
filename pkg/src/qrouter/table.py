"""Deterministic CSV rendering for sweep and router rows."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Mapping, Sequence

from .analytics import COLUMNS


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_csv(rows: Iterable[Mapping], seed: int | None = None, columns: Sequence[str] = COLUMNS) -> str:
    """Header comment with the seed, a header row, then one line per row.

    Floats use ``repr`` so values round-trip exactly; missing values are
    empty fields.
    """
    buf = io.StringIO()
    if seed is not None:
        buf.write(f"# seed={seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
