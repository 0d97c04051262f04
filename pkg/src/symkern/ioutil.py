"""Deterministic text output: CSV and JSON writers.

Floats are rendered with repr (shortest exact round trip), so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import json
import os


def fmt(value) -> str:
    # numpy scalars subclass the Python types; route through the builtins
    # so repr stays the shortest exact round trip
    if isinstance(value, float):
        return repr(float(value))
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        v = value.item()
        return repr(float(v)) if isinstance(v, float) else str(v)
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
