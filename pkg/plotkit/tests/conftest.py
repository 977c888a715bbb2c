import json

import numpy as np
import pytest

SERIES_COLUMNS = ("t", "L_Q", "A", "iso_ratio", "int_k2_ds", "R_sin", "R_cos",
                  "J", "W", "k_min", "k_max", "k_star", "bisection_deficit",
                  "hausdorff", "base_x", "base_y")


@pytest.fixture
def synthetic_run(tmp_path):
    """Hand-built run directory: shrinking circles, schema-conformant."""
    n = 16
    theta = 2 * np.pi * np.arange(n) / n
    times = [0.0, 0.1, 0.2, 0.3]
    header = list(SERIES_COLUMNS) + [f"k_{i:04d}" for i in range(n)]
    rows = []
    for i, t in enumerate(times):
        r = np.sqrt(1.0 - 2.0 * t)
        scal = {
            "t": t, "L_Q": 2 * np.pi * r, "A": np.pi * r**2, "iso_ratio": 4 * np.pi,
            "int_k2_ds": 2 * np.pi / r, "R_sin": 0.0, "R_cos": 0.0,
            "J": 2 * np.pi / r**2, "W": -2 * np.pi * np.log(r), "k_min": 1 / r,
            "k_max": 1 / r, "k_star": 1 / r, "bisection_deficit": 0.0,
            "hausdorff": 0.0, "base_x": r, "base_y": 0.0,
        }
        rows.append([repr(float(scal[c])) for c in SERIES_COLUMNS]
                    + [repr(float(1 / r))] * n)
        xy = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        lines = ["theta,x,y"] + [f"{float(a)!r},{float(x)!r},{float(y)!r}"
                                 for a, (x, y) in zip(theta, xy)]
        frames = tmp_path / "frames"
        frames.mkdir(exist_ok=True)
        (frames / f"{i:04d}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    csv = ",".join(header) + "\n" + "\n".join(",".join(r) for r in rows) + "\n"
    (tmp_path / "snapshots.csv").write_text(csv, encoding="utf-8")
    boundary = np.column_stack([np.cos(theta), np.sin(theta)])
    report = {
        "schema_version": 1,
        "status": "area_target",
        "grid": n,
        "area_P": np.pi,
        "ball_harmonics": [[0, 1.0, 0.0]],
        "ball_boundary": [[float(x), float(y)] for x, y in boundary],
        "t_V_est": 0.5,
        "final": {"t": 0.3, "iso_ratio": 4 * np.pi, "A": np.pi * 0.4},
    }
    (tmp_path / "report.json").write_text(json.dumps(report, indent=2), encoding="utf-8")
    return tmp_path
