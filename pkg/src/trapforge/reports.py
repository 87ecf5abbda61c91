"""Deterministic CSV and key-value report writers.

Floats are written with 9 significant digits. Every file starts with a
commented header carrying the tool version, the config hash and the column
units, so that identical inputs give byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["fmt", "write_csv", "write_keyvalue", "ReportWriter"]


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0.0:
            return "0"  # also folds -0.0
        return f"{x:.9g}"
    if x is None:
        return ""
    return str(x)


def _header(meta) -> list[str]:
    return [f"# {k}: {fmt(v)}" for k, v in meta]


def write_csv(path, columns, units, rows, meta=()) -> Path:
    """Write ``rows`` under ``columns``; ``units`` gives one unit string per column."""
    if len(units) != len(columns):
        raise ValueError("need one unit per column")
    lines = _header(meta)
    lines.append("# units: " + ", ".join(f"{c} [{u}]" for c, u in zip(columns, units)))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_keyvalue(path, items, meta=()) -> Path:
    lines = _header(meta)
    lines += [f"{k} = {fmt(v)}" for k, v in items]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


class ReportWriter:
    """Writes every report of one command into one directory."""

    def __init__(self, out_dir, command, version, config_hash):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.meta = (("tool", f"trapforge {version}"), ("command", command),
                     ("config_sha256", config_hash))
        self.written: list[Path] = []

    def _path(self, name):
        p = (self.out_dir / name).resolve()
        if self.out_dir.resolve() not in p.parents:
            raise ValueError(f"refusing to write outside {self.out_dir}: {name}")
        return p

    def csv(self, name, columns, units, rows, extra_meta=()):
        p = write_csv(self._path(name), columns, units, rows, self.meta + tuple(extra_meta))
        self.written.append(p)
        return p

    def keyvalue(self, name, items, extra_meta=()):
        p = write_keyvalue(self._path(name), items, self.meta + tuple(extra_meta))
        self.written.append(p)
        return p
