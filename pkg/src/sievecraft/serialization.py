"""Deterministic JSON output with fixed-precision floats."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

FLOAT_DIGITS = 17


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, f".{FLOAT_DIGITS}g")
    # keep it recognisably a float for readers that care
    if not any(c in s for c in ".eE"):
        s += ".0"
    return s


def _encode(obj: Any, indent: int | None, level: int) -> str:
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, dict):
        items = [(json.dumps(str(k)), _encode(v, indent, level + 1)) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
        pad, inner = " " * (indent * level), " " * (indent * (level + 1))
        return "{\n" + ",\n".join(f"{inner}{k}: {v}" for k, v in items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        parts = [_encode(v, indent, level + 1) for v in obj]
        if not parts:
            return "[]"
        if indent is None:
            return "[" + ", ".join(parts) + "]"
        pad, inner = " " * (indent * level), " " * (indent * (level + 1))
        return "[\n" + ",\n".join(inner + p for p in parts) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = 2) -> str:
    """JSON text with floats written to 17 significant digits."""
    return _encode(obj, indent, 0)


def dumps_line(obj: Any) -> str:
    return _encode(obj, None, 0)
