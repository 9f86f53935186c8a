"""Trajectory files: CSV with a comment header, or a JSON document."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Trajectory

COLUMNS = ("sigma", "x1", "x2", "u1", "u2", "du1", "du2", "k", "H", "residual", "s")


def _rows(t: Trajectory) -> np.ndarray:
    return np.column_stack((t.sigma, t.y, t.k, t.H, t.residual, t.s))


def write_csv(t: Trajectory, path, seed: int | None = None):
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append(f"# metric={t.meta.get('metric', '')}")
    lines.append(",".join(COLUMNS))
    for row in _rows(t):
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_text(t: Trajectory, path, seed: int | None = None):
    doc = {"seed": seed, "meta": t.meta, "columns": list(COLUMNS),
           "rows": [[float(v) for v in row] for row in _rows(t)]}
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def read_csv(path) -> dict:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(header))
    return {name: data[:, i] for i, name in enumerate(header)}
