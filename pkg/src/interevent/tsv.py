"""Cell formatting shared by every TSV writer."""

from __future__ import annotations

import math


def format_number(value) -> str:
    """Shortest decimal that round-trips to the same float (ints stay ints)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric cells")
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"refusing to serialize non-finite value {value!r}")
    return repr(value)


def undef(reason: str) -> str:
    return f"undef({reason})"


def is_undef(cell: str) -> bool:
    return cell.startswith("undef(") and cell.endswith(")")


def write_rows(fh, rows) -> None:
    for row in rows:
        fh.write("\t".join(row))
        fh.write("\n")
