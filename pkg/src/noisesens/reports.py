"""CSV / JSON report emission with a ``#``-prefixed metadata header."""

from __future__ import annotations

import io
import json
import math
import sys
from typing import Iterable, Mapping, Optional, Sequence

from . import __version__


def fmt_value(v) -> str:
    """17 significant digits for floats (round-trip exact), plain text otherwise."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if hasattr(v, "item"):
        return v.item()
    return v


def render(rows: Iterable[Mapping], columns: Sequence[str], fmt: str = "csv",
           meta: Optional[Mapping] = None) -> str:
    """Render rows in ``columns`` order; ``meta`` becomes the header block."""
    rows = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
    meta = dict(meta or {})
    meta.setdefault("tool", f"noisesens {__version__}")
    if fmt == "json":
        return json.dumps({"meta": meta, "columns": list(columns), "rows": rows}, indent=1, allow_nan=False) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt_value(r[c]) for c in columns) + "\n")
    return buf.getvalue()


def emit_report(rows, columns, fmt: str = "csv", path=None, meta=None) -> str:
    """Write a report to ``path`` (stdout when None) and return its text."""
    text = render(rows, columns, fmt, meta)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return text
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def data_section(text: str) -> str:
    """Strip the ``#`` header block of a CSV report."""
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def read_csv(text: str) -> tuple[list, list]:
    """Parse a CSV report back into ``(columns, rows)`` with float conversion where possible."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines:
        return [], []
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        vals = []
        for tok in ln.split(","):
            try:
                vals.append(float(tok))
            except ValueError:
                vals.append(tok)
        rows.append(dict(zip(columns, vals)))
    return columns, rows
