"""Readers for the simulator's on-disk schemas.

This package consumes only the documented files of a run directory:
snapshots.csv (scalar series + curvature samples), frames/NNNN.csv
(theta, x, y polylines), and report.json. It never imports the solver.
Every parse error names the offending file, and line where applicable.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np


class PlotkitError(Exception):
    """Input file missing or malformed."""


SERIES_COLUMNS = ("t", "L_Q", "A", "iso_ratio", "int_k2_ds", "R_sin", "R_cos",
                  "J", "W", "k_min", "k_max", "k_star", "bisection_deficit",
                  "hausdorff", "base_x", "base_y")


def read_series(path) -> dict[str, np.ndarray]:
    """Scalar columns of snapshots.csv, by name (curvature columns ignored)."""
    path = Path(path)
    if not path.exists():
        raise PlotkitError(f"{path}: no such file")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise PlotkitError(f"{path}: file is empty")
    header = lines[0].split(",")
    missing = [c for c in SERIES_COLUMNS if c not in header]
    if missing:
        raise PlotkitError(f"{path}: header lacks columns {missing}")
    if len(lines) < 2:
        raise PlotkitError(f"{path}: no data rows")
    index = {c: header.index(c) for c in SERIES_COLUMNS}
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split(",")
        if len(tokens) != len(header):
            raise PlotkitError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(tokens)}")
        try:
            rows.append([float(tokens[index[c]]) for c in SERIES_COLUMNS])
        except ValueError as exc:
            raise PlotkitError(f"{path}:{lineno}: {exc}") from exc
    data = np.array(rows)
    return {c: data[:, j] for j, c in enumerate(SERIES_COLUMNS)}


def read_frame(path) -> np.ndarray:
    """One frames/NNNN.csv polyline as an (n, 3) array of theta, x, y."""
    path = Path(path)
    if not path.exists():
        raise PlotkitError(f"{path}: no such file")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "theta,x,y":
        raise PlotkitError(f"{path}:1: expected header 'theta,x,y'")
    if len(lines) < 2:
        raise PlotkitError(f"{path}: no data rows")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split(",")
        if len(tokens) != 3:
            raise PlotkitError(f"{path}:{lineno}: expected 3 fields, got {len(tokens)}")
        try:
            rows.append([float(t) for t in tokens])
        except ValueError as exc:
            raise PlotkitError(f"{path}:{lineno}: {exc}") from exc
    return np.array(rows)


def list_frames(run_dir) -> list[Path]:
    """Frame files of a run, in index order."""
    frames_dir = Path(run_dir) / "frames"
    if not frames_dir.is_dir():
        raise PlotkitError(f"{frames_dir}: no such directory")
    paths = sorted(p for p in frames_dir.iterdir()
                   if re.fullmatch(r"\d{4}\.csv", p.name))
    if not paths:
        raise PlotkitError(f"{frames_dir}: no NNNN.csv frame files")
    return paths


def read_report(run_dir) -> dict:
    """report.json of a run; must carry the ball geometry and area."""
    path = Path(run_dir) / "report.json"
    if not path.exists():
        raise PlotkitError(f"{path}: no such file")
    try:
        report = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlotkitError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    for key in ("area_P", "ball_boundary", "final"):
        if key not in report:
            raise PlotkitError(f"{path}: missing key '{key}'")
    return report
