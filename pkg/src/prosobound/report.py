"""Report formatting and atomic file output.

Every command writes both a human-readable aligned table and a
tab-separated version of the same numbers, always echoing the raw counts
so each percentage can be recomputed independently. Files are written via
write-then-rename so a crashed or parallel run never leaves partial rows.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

NA = "n/a"


def fmt_pct(v: float | None) -> str:
    """Percentage with 2 decimals; None renders as the explicit n/a marker."""
    return NA if v is None else f"{100 * v:.2f}"


def fmt_frac(v: float | None, decimals: int = 6) -> str:
    return NA if v is None else f"{v:.{decimals}f}"


def format_aligned(headers: list[str], rows: list[list[str]]) -> str:
    """Monospace table: left-aligned first column, right-aligned rest."""
    table = [headers] + rows
    widths = [max(len(r[c]) for r in table) for c in range(len(headers))]
    out = []
    for r in table:
        cells = [r[0].ljust(widths[0])]
        cells += [r[c].rjust(widths[c]) for c in range(1, len(headers))]
        out.append("  ".join(cells).rstrip())
    return "\n".join(out) + "\n"


def format_tsv(headers: list[str], rows: list[list[str]]) -> str:
    return "\n".join("\t".join(r) for r in [headers] + rows) + "\n"


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


__all__ = ["NA", "fmt_pct", "fmt_frac", "format_aligned", "format_tsv",
           "write_text_atomic"]
