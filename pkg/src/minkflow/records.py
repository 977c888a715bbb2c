"""On-disk result schemas: snapshot CSV, frame CSV, and the JSON report.

Numbers are written with Python's shortest round-trip repr so a re-read
recovers the exact float64 values, and nothing time- or host-dependent
goes into the files: identical inputs give identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

_SCALAR_COLUMNS = [
    "t", "L_Q", "A", "iso_ratio", "int_k2_ds", "R_sin", "R_cos", "J", "W",
    "k_min", "k_max", "k_star", "bisection_deficit", "hausdorff",
    "base_x", "base_y",
]


@dataclass
class SnapshotRecord:
    """One recorded instant of a flow run."""

    t: float
    length: float
    area: float
    iso_ratio: float
    int_k2: float
    r_sin: float
    r_cos: float
    J: float
    W: float
    k_min: float
    k_max: float
    k_star: float
    bisection_deficit: float
    hausdorff: float
    base: np.ndarray
    k: np.ndarray

    def scalars(self) -> list[float]:
        return [self.t, self.length, self.area, self.iso_ratio, self.int_k2,
                self.r_sin, self.r_cos, self.J, self.W, self.k_min, self.k_max,
                self.k_star, self.bisection_deficit, self.hausdorff,
                float(self.base[0]), float(self.base[1])]

    def validate_finite(self):
        values = np.concatenate([np.asarray(self.scalars()), self.k])
        if not np.all(np.isfinite(values)):
            raise ValueError(f"non-finite value in snapshot at t={self.t!r}")


def write_snapshots(path, records: list[SnapshotRecord]) -> None:
    path = Path(path)
    if not records:
        raise ValueError("refusing to write an empty snapshot series")
    n = records[0].k.size
    header = _SCALAR_COLUMNS + [f"k_{i:04d}" for i in range(n)]
    lines = [",".join(header)]
    for rec in records:
        rec.validate_finite()
        if rec.k.size != n:
            raise ValueError("inconsistent grid size across snapshots")
        row = [repr(float(v)) for v in rec.scalars()]
        row += [repr(float(v)) for v in rec.k]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_snapshots(path) -> list[SnapshotRecord]:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"empty snapshot file: {path}")
    header = lines[0].split(",")
    if header[: len(_SCALAR_COLUMNS)] != _SCALAR_COLUMNS:
        raise ValueError(f"unrecognized snapshot header in {path}")
    out = []
    for line in lines[1:]:
        vals = [float(tok) for tok in line.split(",")]
        s = vals[: len(_SCALAR_COLUMNS)]
        k = np.array(vals[len(_SCALAR_COLUMNS):])
        out.append(SnapshotRecord(
            t=s[0], length=s[1], area=s[2], iso_ratio=s[3], int_k2=s[4],
            r_sin=s[5], r_cos=s[6], J=s[7], W=s[8], k_min=s[9], k_max=s[10],
            k_star=s[11], bisection_deficit=s[12], hausdorff=s[13],
            base=np.array([s[14], s[15]]), k=k))
    return out


def write_frame(path, theta: np.ndarray, xy: np.ndarray) -> None:
    path = Path(path)
    lines = ["theta,x,y"]
    for th, (x, y) in zip(theta, xy):
        lines.append(f"{float(th)!r},{float(x)!r},{float(y)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_frame(path) -> np.ndarray:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "theta,x,y":
        raise ValueError(f"unrecognized frame header in {path}")
    return np.array([[float(t) for t in line.split(",")] for line in lines[1:]])


def write_report(path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def read_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
