"""Deterministic CSV and manifest writing."""

from __future__ import annotations

import csv
import enum
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import yaml


def format_value(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, enum.Enum):
        return str(v.name if isinstance(v.value, int) else v.value)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        # shortest round-trip form, locale independent
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return format_value(v.item())
    if isinstance(v, (list, tuple)):
        return ";".join(format_value(x) for x in v)
    return str(v)


def write_csv(path: Path, rows: Sequence[Mapping[str, Any]], columns: Optional[Sequence[str]] = None) -> Path:
    """Write rows with a header, '\\n' line ends and repr floats."""
    path = Path(path)
    if columns is None:
        columns = []
        for r in rows:
            for k in r:
                if k not in columns:
                    columns.append(k)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_value(r.get(c)) for c in columns])
    return path


def read_csv(path: Path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_yaml(path: Path, data: Mapping) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(_plain(data), fh, sort_keys=False, default_flow_style=False)
    return path


def _plain(x):
    if isinstance(x, Mapping):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, enum.Enum):
        return x.value
    if hasattr(x, "item"):
        return x.item()
    return x
