"""Deterministic JSON and CSV emission.

All floats are rendered with 17 significant digits (round-trip exact for
float64) and JSON keys keep insertion order, so a fixed computation always
produces byte-identical output.
"""

from __future__ import annotations

import math
from typing import Any, Iterable, Sequence

import numpy as np


def format_float(x: float) -> str:
    """17 significant digit rendering; integral floats keep a trailing .0 marker."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    # keep the value recognizably a float in CSV/JSON output
    if "e" not in s and "E" not in s and "." not in s:
        s += ".0"
    return s


def _render(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(_escape(obj))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for k, v in obj.items():
            if not first:
                out.append(",")
            first = False
            out.append(_escape(str(k)))
            out.append(":")
            _render(v, out)
        out.append("}")
    elif isinstance(obj, np.ndarray):
        _render(obj.tolist(), out)
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        first = True
        for v in obj:
            if not first:
                out.append(",")
            first = False
            _render(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _escape(s: str) -> str:
    buf = ['"']
    for ch in s:
        if ch == '"':
            buf.append('\\"')
        elif ch == "\\":
            buf.append("\\\\")
        elif ch == "\n":
            buf.append("\\n")
        elif ch == "\t":
            buf.append("\\t")
        elif ch == "\r":
            buf.append("\\r")
        elif ord(ch) < 0x20:
            buf.append(f"\\u{ord(ch):04x}")
        else:
            buf.append(ch)
    buf.append('"')
    return "".join(buf)


def json_dumps(obj: Any) -> str:
    out: list[str] = []
    _render(obj, out)
    return "".join(out)


def csv_value(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_lines(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(csv_value(v) for v in row))
    return "\n".join(lines) + "\n"
