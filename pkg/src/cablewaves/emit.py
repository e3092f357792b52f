"""Deterministic CSV tables plus a JSON-lines metadata sidecar."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .experiment import ExperimentSpec

ARTIFACT = "cablewaves"
METADATA_FILE = "metadata.jsonl"
CONFIG_FILE = "run.cfg"


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: np.ndarray  # 2-D, one row per sample; object dtype allowed for text columns

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError(f"table {self.name}: {self.rows.shape} does not match "
                             f"{len(self.columns)} columns")


def table(name: str, columns: Sequence[str], *cols) -> Table:
    """Assemble a table from equal-length column arrays."""
    n = {len(c) for c in cols}
    if len(n) > 1:
        raise ValueError(f"table {name}: ragged columns {sorted(n)}")
    rows = np.empty((n.pop() if n else 0, len(cols)), dtype=object)
    for j, c in enumerate(cols):
        rows[:, j] = list(c)
    return Table(name, tuple(columns), rows)


def format_cell(val) -> str:
    if isinstance(val, (bool, np.bool_)):
        return "1" if val else "0"
    if isinstance(val, (int, np.integer)):
        return str(int(val))
    if isinstance(val, (float, np.floating)):
        return format(float(val) + 0.0, ".17g")  # + 0.0 folds -0 into 0
    return str(val)


def write_table(path: Path, tab: Table) -> None:
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(tab.columns)
            for row in tab.rows:
                writer.writerow([format_cell(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def emit(tables: Sequence[Table], spec: ExperimentSpec, summary: dict | None = None) -> list[Path]:
    """Write each table as ``<name>.csv``, the metadata sidecar and a ``run.cfg`` echo.

    Output bytes depend only on ``spec`` and the table contents.
    """
    out = spec.output
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    written = []
    records = [{"record": "run", "artifact": ARTIFACT, "version": __version__,
                "command": spec.command, "parameters": spec.echo(),
                "summary": _jsonable(summary or {})}]
    for tab in tables:
        path = out / f"{tab.name}.csv"
        write_table(path, tab)
        written.append(path)
        records.append({"record": "table", "file": path.name, "columns": list(tab.columns),
                        "rows": int(tab.rows.shape[0]), "artifact": ARTIFACT,
                        "version": __version__, "parameters": spec.echo()})
    meta = out / METADATA_FILE
    cfg = out / CONFIG_FILE
    try:
        meta.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in records))
        cfg.write_text(spec.to_text())
    except OSError as exc:
        raise OSError(f"cannot write metadata in {out}: {exc.strerror}") from exc
    return written + [meta, cfg]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _column(cells: list[str]) -> np.ndarray:
    try:
        return np.array([float(c) for c in cells])
    except ValueError:
        return np.array(cells, dtype=object)


def read_table(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Load a table written by :func:`write_table`.

    The result is a float array, or an object array when some column holds text.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = list(reader)
    cols = [_column([r[j] for r in body]) for j in range(len(header))]
    if all(c.dtype == float for c in cols):
        return header, np.column_stack(cols) if body else np.empty((0, len(header)))
    rows = np.empty((len(body), len(header)), dtype=object)
    for j, c in enumerate(cols):
        rows[:, j] = c
    return header, rows
