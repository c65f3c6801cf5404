"""Deterministic text serialisation: 17 significant digits, sorted JSON keys."""

from __future__ import annotations

import json
import math

import numpy as np


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return ""
    return format(x, ".17g")


def _encode(obj, out: list):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        text = fmt_float(obj)
        out.append(text if text else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(": ")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _encode(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with sorted keys and floats printed to 17 significant digits."""
    out: list = []
    _encode(obj, out)
    return "".join(out) + "\n"


def csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return fmt_float(x)
    text = str(x)
    if any(c in text for c in ',"\r\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def csv_text(header, rows) -> str:
    lines = [",".join(csv_cell(h) for h in header)]
    lines.extend(",".join(csv_cell(v) for v in row) for row in rows)
    return "\r\n".join(lines) + "\r\n"
