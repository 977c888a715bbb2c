import json

import numpy as np
import pytest

import minkflow.cli as cli
from minkflow.isoperimetry import IsoReport
from minkflow.records import read_frame, read_report, read_snapshots, write_snapshots


def write_config(path, **kw):
    data = {
        "ball": {"harmonics": kw.get("ball", [[0, 1.0, 0.0]])},
        "curvature": {"harmonics": kw.get("curvature", [[0, 1.0, 0.0]])},
        "grid": kw.get("grid", 64),
        "solver": kw.get("solver", {"sigma": 0.5, "stop_area_fraction": 0.2,
                                    "snapshot_every": 5}),
    }
    if "out" in kw:
        data["out"] = kw["out"]
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_simulate_circle_outputs(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg), "--quiet"]) == 0
    out = tmp_path / "run"
    records = read_snapshots(out / "snapshots.csv")
    report = read_report(out / "report.json")
    assert report["schema_version"] == 1
    assert report["status"] == "area_target"
    assert report["t_V_est"] == pytest.approx(0.5, abs=1e-6)
    assert all(report["invariants"].values())
    assert report["area_P"] == pytest.approx(np.pi, abs=1e-12)
    assert len(report["ball_boundary"]) == 64
    assert len(records) >= 3
    frame0 = read_frame(out / "frames" / "0000.csv")
    assert frame0.shape == (64, 3)
    # t=0 frame is the unit circle centered at (-1, 0)
    radii = np.hypot(frame0[:, 1] + 1.0, frame0[:, 2])
    assert np.max(np.abs(radii - 1.0)) < 1e-12


def test_simulate_deterministic_bytes(tmp_path):
    cfg1 = write_config(tmp_path / "c1.json", out=str(tmp_path / "r1"))
    cfg2 = write_config(tmp_path / "c2.json", out=str(tmp_path / "r2"))
    assert cli.main(["simulate", "--config", str(cfg1), "--quiet"]) == 0
    assert cli.main(["simulate", "--config", str(cfg2), "--quiet"]) == 0
    for name in ("snapshots.csv", "report.json", "frames/0000.csv"):
        b1 = (tmp_path / "r1" / name).read_bytes()
        b2 = (tmp_path / "r2" / name).read_bytes()
        assert b1 == b2, name


def test_snapshot_csv_round_trip(tmp_path):
    cfg = write_config(tmp_path / "cfg.json", out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg), "--quiet"]) == 0
    path = tmp_path / "run" / "snapshots.csv"
    records = read_snapshots(path)
    rewritten = tmp_path / "again.csv"
    write_snapshots(rewritten, records)
    assert rewritten.read_bytes() == path.read_bytes()
    again = read_snapshots(rewritten)
    for a, b in zip(records, again):
        assert a.scalars() == b.scalars()
        assert np.array_equal(a.k, b.k)


def test_simulate_rejects_odd_ball_harmonic(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", ball=[[0, 1.0, 0.0], [3, 0.1, 0.0]],
                       out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "odd harmonic order 3" in err


def test_simulate_rejects_inadmissible_curvature(tmp_path, capsys):
    # k = 1 + 0.5 cos t is positive but violates the closure condition
    cfg = write_config(tmp_path / "cfg.json", curvature=[[0, 1.0, 0.0], [1, 0.5, 0.0]],
                       out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "R_sin" in err and "R_cos" in err


def test_simulate_rejects_bad_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert cli.main(["simulate", "--config", str(bad)]) == 1
    assert "config error" in capsys.readouterr().err


def test_simulate_requires_out(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json")
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    assert "output directory" in capsys.readouterr().err


def test_certify_ball_circle_config(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", ball=[[0, 1.0, 0.0], [2, 0.2, 0.0]],
                       grid=128)
    assert cli.main(["certify", str(cfg)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert abs(report["iso_slack"]) < 1e-9
    assert abs(report["gage_slack"]) < 1e-9
    assert report["symmetric"] is True


def test_certify_run_directory(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg), "--quiet"]) == 0
    assert cli.main(["certify", str(tmp_path / "run")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["iso_slack"] >= -1e-8


def test_certify_corrupted_snapshot(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg), "--quiet"]) == 0
    path = tmp_path / "run" / "snapshots.csv"
    records = read_snapshots(path)
    records[-1].k[5] = -records[-1].k[5]
    write_snapshots(path, records)
    assert cli.main(["certify", str(tmp_path / "run")]) == 1
    assert "not strictly positive" in capsys.readouterr().err


def test_certify_flags_negative_slack(tmp_path, capsys, monkeypatch):
    cfg = write_config(tmp_path / "cfg.json", grid=128)
    doctored = IsoReport(
        iso_ratio=4 * np.pi, iso_slack=-1e-3, r_in=1.0, r_out=1.0,
        bonnesen_at_rin=0.0, bonnesen_at_rout=0.0, int_k2_ds=2 * np.pi,
        gage_slack=0.0, refined_gage_slack=0.0, bisection_deficit=0.0,
        radii_deficit=0.0, symmetric=True, chord_scan_ambiguous=False)
    monkeypatch.setattr(cli, "inequality_report", lambda curve: doctored)
    assert cli.main(["certify", str(cfg)]) == 3
    assert "slack violation" in capsys.readouterr().err


def test_simulate_solver_failure_still_writes_report(tmp_path, capsys):
    # sigma at the stability edge with a near-Nyquist mode and no retries:
    # the first rejected step surfaces as a solver failure, exit 2
    cfg = write_config(
        tmp_path / "cfg.json",
        curvature=[[0, 1.0, 0.0], [16, 0.5, 0.0]],
        solver={"sigma": 0.9, "stop_area_fraction": 0.01, "snapshot_every": 5,
                "max_retries": 0},
        out=str(tmp_path / "run"))
    assert cli.main(["simulate", "--config", str(cfg)]) == 2
    assert "solver failure" in capsys.readouterr().err
    report = read_report(tmp_path / "run" / "report.json")
    assert report["status"] == "solver_failure"
    assert "failure" in report
    assert (tmp_path / "run" / "snapshots.csv").exists()


def test_certify_missing_input(tmp_path, capsys):
    assert cli.main(["certify", str(tmp_path / "nope.json")]) == 1
    assert "certify error" in capsys.readouterr().err


def test_selftest_under_resolved_grid_fails(capsys):
    assert cli.main(["selftest", "--grid", "16", "--quiet"]) == 1
    out = capsys.readouterr().out
    assert "FAILED" in out
