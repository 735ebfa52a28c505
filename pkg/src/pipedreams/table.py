"""Result tables with CSV and JSON encodings that carry identical numbers."""

from __future__ import annotations

import csv
import functools
import io
import json
import math
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__


@functools.lru_cache(maxsize=1)
def build_id() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--tags"],
            cwd=here, capture_output=True, text=True, timeout=5, check=True,
        )
        desc = out.stdout.strip()
        if desc:
            return f"{__version__}+{desc}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _plain(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    if hasattr(v, "item"):
        return _plain(v.item())
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def dumps(obj) -> str:
    """JSON with shortest round-trip float text and stable key order."""
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, **row) -> None:
        missing = [c for c in self.columns if c not in row]
        if missing:
            raise KeyError(f"row is missing columns {missing}")
        self.rows.append({c: _plain(row[c]) for c in self.columns})

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    def to_json(self) -> dict:
        return {"table": self.name, "meta": _plain(self.meta), "columns": self.columns, "rows": self.rows}

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k in sorted(self.meta):
            buf.write(f"# {k}: {json.dumps(_plain(self.meta[k]))}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in self.columns])
        return buf.getvalue()

    def render(self, fmt: str = "json") -> str:
        if fmt == "json":
            return dumps(self.to_json())
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")
