"""Tiny CSV layer shared by every report: header row, data rows, ``# key=value`` metadata."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Mapping, Sequence


def render(columns: Sequence[str], rows: Iterable[Mapping[str, object] | Sequence[object]],
           meta: Mapping[str, object] | None = None) -> str:
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if isinstance(row, Mapping):
            row = [row[c] for c in columns]
        w.writerow(row)
    return buf.getvalue()


def parse(text: str) -> tuple[dict[str, str], list[str], list[dict[str, str]]]:
    """Inverse of :func:`render`: ``(meta, columns, rows)`` with string values."""
    meta: dict[str, str] = {}
    lines = text.split("\n")
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        k, _, v = lines[i][1:].strip().partition("=")
        meta[k] = v
        i += 1
    reader = csv.reader(io.StringIO("\n".join(lines[i:]), newline=""))
    try:
        columns = next(reader)
    except StopIteration:
        raise ValueError("CSV has no header row") from None
    rows = []
    for rec in reader:
        if len(rec) != len(columns):
            raise ValueError(f"row has {len(rec)} fields, header has {len(columns)}")
        rows.append(dict(zip(columns, rec)))
    return meta, columns, rows


def rerender(text: str) -> str:
    meta, columns, rows = parse(text)
    return render(columns, rows, meta)
