"""CSV files with a ``#`` comment header.

Floats are written with 17 significant digits so they parse back to the same
double. Files are written to a temporary sibling and renamed, so a failed
run never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import math
import os
from contextlib import contextmanager
from pathlib import Path

from . import __version__


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if hasattr(value, "item"):  # numpy scalar
        return fmt(value.item())
    return str(value)


def header_lines(command: str, config: dict) -> list[str]:
    lines = [f"# pmdigraph {__version__}", f"# command: {command}"]
    lines += [f"# {k}={fmt(v)}" for k, v in config.items()]
    return lines


def render(command: str, config: dict, columns: list[str], rows) -> str:
    buf = io.StringIO()
    for line in header_lines(command, config):
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


@contextmanager
def atomic_path(path: Path):
    """Yield a temporary path that replaces ``path`` only on success."""
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def write_csv(path, command: str, config: dict, columns: list[str], rows) -> Path:
    path = Path(path)
    text = render(command, config, columns, rows)
    with atomic_path(path) as tmp:
        tmp.write_text(text, encoding="utf-8")
    return path


def read_csv(path) -> tuple[dict, list[dict]]:
    """Return ``(meta, rows)``; ``meta`` holds the ``key=value`` header entries."""
    meta = {}
    body = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            entry = line[1:].strip()
            if "=" in entry:
                k, v = entry.split("=", 1)
                meta[k] = v
        else:
            body.append(line)
    rows = list(csv.DictReader(body))
    return meta, rows
