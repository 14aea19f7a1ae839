"""Readers for the documented mmdplan output formats.

Three inputs exist: the per-run JSON log (scenario header, step records,
metrics), the flat metrics CSV written by sweeps, and the tab-separated
cost-surface table (rows ``v<TAB>w<TAB>q``). Readers never write anything
back; parse failures carry the offending line.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ParseError


def load_run_log(path: str | Path) -> dict:
    """Parse a run log JSON document."""
    file = Path(path)
    if not file.exists():
        raise ParseError(f"{path}: log file does not exist")
    try:
        log = json.loads(file.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    for key in ("scenario", "steps", "metrics"):
        if key not in log:
            raise ParseError(f"{path}: missing top-level key {key!r}")
    return log


def load_metrics_csv(path: str | Path) -> list[dict]:
    """Parse a sweep metrics CSV into one dict per run row."""
    file = Path(path)
    if not file.exists():
        raise ParseError(f"{path}: metrics file does not exist")
    with file.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if not reader.fieldnames or "method" not in reader.fieldnames:
            raise ParseError(f"{path}: line 1: not a metrics CSV header")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append(
                    {
                        "label": _row_label(row),
                        "deviation": float(row["deviation"]),
                        "control_cost": float(row["control_cost"]),
                        "steps": float(row["steps"]),
                        "wall_time_s": float(row["wall_time_s"]),
                    }
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}: line {lineno}: bad row ({exc})") from None
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return rows


def _row_label(row: dict) -> str:
    """Group label: distribution matching is labelled by kernel degree."""
    method = row.get("method", "?")
    if method == "rkhs":
        return f"rkhs d={row.get('degree', '?')}"
    return str(method)


def load_surface_table(path: str | Path) -> np.ndarray:
    """Parse a cost-surface dump into an (m, 3) array of (v, w, q) rows."""
    file = Path(path)
    if not file.exists():
        raise ParseError(f"{path}: surface file does not exist")
    rows = []
    for lineno, line in enumerate(file.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) != 3:
            raise ParseError(f"{path}: line {lineno}: expected 3 tab-separated columns")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: non-numeric cell") from None
    if not rows:
        raise ParseError(f"{path}: no surface rows")
    return np.asarray(rows)
