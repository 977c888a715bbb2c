"""Figure builders for the three supported kinds.

frames      overlaid lab-frame curves, colored by time
normalized  area-normalized centered curves over the unit-ball boundary
series      A, L_Q, iso ratio, and the oscillation gap J against time

Builders return matplotlib Figure objects; rendering to disk happens in
the CLI. Everything is a pure function of the input files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import PlotkitError, list_frames, read_frame, read_report, read_series


def _close_loop(xy: np.ndarray) -> np.ndarray:
    return np.vstack([xy, xy[:1]])


def _polygon_centroid(xy: np.ndarray) -> np.ndarray:
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return np.array([cx, cy])


def _selected_frames(run_dir, stride: int):
    paths = list_frames(run_dir)
    picked = paths[::max(1, stride)]
    if picked[-1] != paths[-1]:
        picked.append(paths[-1])
    return picked


def frames_figure(run_dir, stride: int = 1):
    """Overlay of the stored lab-frame curves."""
    picked = _selected_frames(run_dir, stride)
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.get_cmap("viridis")
    for rank, path in enumerate(picked):
        xy = read_frame(path)[:, 1:]
        color = cmap(rank / max(1, len(picked) - 1))
        ax.plot(*_close_loop(xy).T, color=color, linewidth=0.9)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"curve frames ({len(picked)} of {len(list_frames(run_dir))})")
    fig.tight_layout()
    return fig


def normalized_figure(run_dir, stride: int = 1):
    """Area-normalized centered curves converging onto the unit ball.

    Scales each frame by sqrt(area_P / A) with A taken from the matching
    snapshots.csv row (frames are written one per snapshot).
    """
    report = read_report(run_dir)
    series = read_series(Path(run_dir) / "snapshots.csv")
    area_ball = float(report["area_P"])
    boundary = np.asarray(report["ball_boundary"], dtype=float)
    all_frames = list_frames(run_dir)
    if len(all_frames) != series["A"].size:
        raise PlotkitError(
            f"{run_dir}: {len(all_frames)} frames but {series['A'].size} snapshot rows")
    picked = _selected_frames(run_dir, stride)
    fig, ax = plt.subplots(figsize=(6, 6))
    cmap = plt.get_cmap("plasma")
    for rank, path in enumerate(picked):
        xy = read_frame(path)[:, 1:]
        area = float(series["A"][all_frames.index(path)])
        eta = np.sqrt(area_ball / area) * (xy - _polygon_centroid(xy))
        color = cmap(rank / max(1, len(picked) - 1))
        ax.plot(*_close_loop(eta).T, color=color, linewidth=0.8, alpha=0.8)
    ax.plot(*_close_loop(boundary).T, color="black", linewidth=1.8,
            label="unit ball boundary")
    ax.set_aspect("equal")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("normalized curves over the unit ball")
    fig.tight_layout()
    return fig


def series_figure(run_dir):
    """Diagnostic time series; the iso panel carries the optimal level."""
    series = read_series(Path(run_dir) / "snapshots.csv")
    report = read_report(run_dir)
    t = series["t"]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    (ax_a, ax_l), (ax_iso, ax_j) = axes

    ax_a.plot(t, series["A"], color="tab:blue")
    ax_a.set_ylabel("enclosed area A")
    ax_l.plot(t, series["L_Q"], color="tab:orange")
    ax_l.set_ylabel("Q-length")
    ax_iso.plot(t, series["iso_ratio"], color="tab:green", label="L_Q^2 / A")
    ax_iso.axhline(4.0 * float(report["area_P"]), color="gray", linestyle="--",
                   linewidth=1.0, label="4 A(P)")
    ax_iso.set_ylabel("isoperimetric ratio")
    ax_iso.legend(fontsize=8)
    ax_j.plot(t, series["J"], color="tab:red")
    ax_j.set_ylabel("oscillation gap J")
    for ax in (ax_iso, ax_j):
        ax.set_xlabel("t")
    fig.tight_layout()
    return fig


FIGURE_KINDS = {
    "frames": frames_figure,
    "normalized": normalized_figure,
    "series": lambda run_dir, stride=1: series_figure(run_dir),
}


def render(kind: str, run_dir, out_file, stride: int = 1) -> None:
    """Build one figure kind and write it to out_file."""
    try:
        builder = FIGURE_KINDS[kind]
    except KeyError:
        raise PlotkitError(f"unknown figure kind '{kind}' "
                           f"(expected one of {sorted(FIGURE_KINDS)})") from None
    fig = builder(run_dir, stride=stride)
    fig.savefig(out_file, dpi=150)
    plt.close(fig)
