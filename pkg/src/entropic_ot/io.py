"""CSV and JSON helpers shared by the command line tools.

Sample files hold one point per row with comma-separated coordinates and an
optional header row (detected when the first row does not parse as numbers).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Unreadable or malformed input file."""


def _parse_row(row, lineno, path):
    try:
        return [float(tok) for tok in row]
    except ValueError:
        raise InputError(f"{path}:{lineno}: non-numeric value in {row!r}") from None


def read_points(path) -> np.ndarray:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(tok.strip() for tok in r)]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty sample")
    try:
        [float(tok) for tok in rows[0]]
    except ValueError:
        rows = rows[1:]  # header
    if not rows:
        raise InputError(f"{path}: empty sample")
    data = [_parse_row(r, i + 1, path) for i, r in enumerate(rows)]
    width = {len(r) for r in data}
    if len(width) != 1:
        raise InputError(f"{path}: rows have inconsistent dimensions {sorted(width)}")
    arr = np.asarray(data, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{path}: non-finite coordinates")
    return arr


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def read_grid(spec) -> np.ndarray:
    """Grid from a JSON file or JSON text.

    Either a list of points (``[[0.1, 0.2], ...]`` or ``[0.1, 0.2]`` for 1-D)
    or an object ``{"lower": [...], "upper": [...], "resolution": k}``.
    """
    from .potentials import box_grid

    text = str(spec)
    p = Path(text)
    try:
        if p.exists():
            text = p.read_text()
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse grid specification: {exc}") from exc
    if isinstance(obj, dict):
        try:
            return box_grid(obj["lower"], obj["upper"], obj["resolution"])
        except KeyError as exc:
            raise InputError(f"grid object lacks key {exc}") from None
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InputError("grid must be a nonempty list of points")
    return arr


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
