"""Batch front end: simulate, certify, selftest.

Exit codes: simulate 0 ok / 1 config error / 2 solver failure (report
still written); certify 0 ok / 1 input error / 3 slack violation;
selftest 0 all criteria pass / 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import acceptance
from .config import RunConfig
from .curve import ConvexCurve
from .errors import MinkflowError, SolverFailure
from .flow import evolution_residuals, run_flow
from .isoperimetry import inequality_report
from .records import (
    SCHEMA_VERSION,
    read_report,
    read_snapshots,
    write_frame,
    write_report,
    write_snapshots,
)

CERTIFY_TOL = 1e-8


def _build_report(cfg: RunConfig, ball, series, monitors, t_v, status) -> dict:
    final = series[-1]
    report = {
        "schema_version": SCHEMA_VERSION,
        "status": status,
        "grid": ball.grid.n,
        "area_P": ball.area,
        "ball_harmonics": ball.support.harmonics(),
        "ball_boundary": [[float(x), float(y)] for x, y in ball.p],
        "t_V_est": t_v,
        "final": {
            "t": final.t, "L_Q": final.length, "A": final.area,
            "iso_ratio": final.iso_ratio, "int_k2_ds": final.int_k2,
            "k_min": final.k_min, "k_max": final.k_max, "k_star": final.k_star,
            "bisection_deficit": final.bisection_deficit,
            "hausdorff": final.hausdorff,
        },
        "monitors": {
            "steps": monitors.steps,
            "retries": monitors.retries,
            "max_closure_rel": monitors.max_closure_rel,
            "min_positivity_margin": monitors.min_positivity_margin,
            "max_iso_step_increase": monitors.max_iso_step_increase,
        },
        "liminf_gap": {
            "final": final.length * (final.int_k2 - ball.area * final.length / final.area),
            "min": min(r.length * (r.int_k2 - ball.area * r.length / r.area)
                       for r in series),
        },
    }
    if len(series) >= 3:
        res = evolution_residuals(series, ball.area)
        report["max_residuals"] = {
            "dL_rel": res.max_d_length_rel,
            "dA_rel": res.max_d_area_rel,
            "diso_rel": res.max_d_iso_rel,
            "closure_rel": monitors.max_closure_rel,
        }
    else:
        report["max_residuals"] = None
    js = [r.J for r in series]
    report["invariants"] = {
        "closure_within_tol": monitors.max_closure_rel <= cfg.solver.tol_close,
        "iso_nonincreasing": monitors.max_iso_step_increase <= 1e-10,
        "positivity_preserved": monitors.min_positivity_margin >= -cfg.solver.tol_pos,
        "J_nondecreasing": all(js[i + 1] >= js[i] - 1e-8 * (1.0 + abs(js[i]))
                               for i in range(len(js) - 1)),
    }
    return report


def _write_outputs(out_dir: Path, ball, series, report: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_snapshots(out_dir / "snapshots.csv", series)
    frames = out_dir / "frames"
    frames.mkdir(exist_ok=True)
    for i, rec in enumerate(series):
        lab = ConvexCurve(ball, rec.k, base=rec.base).vertices
        write_frame(frames / f"{i:04d}.csv", ball.grid.theta, lab)
    write_report(out_dir / "report.json", report)


def cmd_simulate(args) -> int:
    try:
        cfg = RunConfig.from_file(args.config, grid=args.grid, out=args.out,
                                  snapshots_every=args.snapshots_every)
        ball = cfg.make_ball()
        k0 = cfg.initial_curvature(ball)
    except MinkflowError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if cfg.out is None:
        print("config error: no output directory (set 'out' or pass --out)",
              file=sys.stderr)
        return 1
    out_dir = Path(cfg.out)

    start = time.perf_counter()
    try:
        result = run_flow(ball, k0, cfg.solver)
    except MinkflowError as exc:
        if isinstance(exc, SolverFailure) and exc.series:
            report = _build_report(cfg, ball, exc.series, exc.monitors,
                                   t_v=float("nan"), status="solver_failure")
            report["failure"] = str(exc)
            # replace the unknown t_V by the last-area extrapolation
            last = exc.series[-1]
            report["t_V_est"] = last.t + last.area / (2.0 * ball.area)
            _write_outputs(out_dir, ball, exc.series, report)
            print(f"solver failure: {exc}", file=sys.stderr)
            return 2
        print(f"run error: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - start

    report = _build_report(cfg, ball, result.series, result.monitors,
                           result.t_v_estimate, result.monitors.status)
    _write_outputs(out_dir, ball, result.series, report)
    if not args.quiet:
        final = result.series[-1]
        print(f"{result.monitors.status}: {result.monitors.steps} steps to "
              f"t={final.t:.6f}, t_V_est={result.t_v_estimate:.6f}, "
              f"iso={final.iso_ratio:.6f} (4A(P)={4 * ball.area:.6f}) "
              f"[{elapsed:.1f}s] -> {out_dir}")
    return 0


def _curve_from_run_dir(snapshots_path: Path, row: int) -> ConvexCurve:
    report_path = snapshots_path.parent / "report.json"
    if not report_path.exists():
        raise MinkflowError(f"no report.json next to {snapshots_path}; "
                            "cannot rebuild the unit ball")
    report = read_report(report_path)
    cfg = RunConfig.from_dict({
        "ball": {"harmonics": report["ball_harmonics"]},
        "curvature": {"harmonics": [[0, 1.0, 0.0]]},
        "grid": report["grid"],
    })
    ball = cfg.make_ball()
    records = read_snapshots(snapshots_path)
    rec = records[row]
    return ConvexCurve(ball, rec.k, base=rec.base)


def cmd_certify(args) -> int:
    path = Path(args.input)
    try:
        if path.is_dir():
            curve = _curve_from_run_dir(path / "snapshots.csv", args.row)
        elif path.suffix == ".csv":
            curve = _curve_from_run_dir(path, args.row)
        else:
            cfg = RunConfig.from_file(path, grid=args.grid)
            ball = cfg.make_ball()
            curve = ConvexCurve(ball, cfg.initial_curvature(ball))
        report = inequality_report(curve)
    except (MinkflowError, OSError, ValueError, IndexError) as exc:
        print(f"certify error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if report.min_slack() < -CERTIFY_TOL:
        print(f"slack violation: min slack {report.min_slack():.3e} < -{CERTIFY_TOL:.0e}",
              file=sys.stderr)
        return 3
    return 0


def cmd_selftest(args) -> int:
    start = time.perf_counter()
    echo = None if args.quiet else print
    results = acceptance.run_all(grid=args.grid, echo=echo)
    failed = [r for r in results if not r.passed]
    total = time.perf_counter() - start
    print(f"{len(results) - len(failed)}/{len(results)} acceptance criteria passed "
          f"in {total:.1f}s" + (f"; FAILED: {', '.join(r.name for r in failed)}"
                                if failed else ""))
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="minkflow",
        description="Curvature flow in a Minkowski plane: simulate, certify, selftest.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a flow and write snapshot files")
    p_sim.add_argument("--config", required=True, help="JSON run configuration")
    p_sim.add_argument("--out", default=None, help="output directory (overrides config)")
    p_sim.add_argument("--snapshots-every", type=int, default=None,
                       help="accepted steps between snapshots")
    p_sim.add_argument("--grid", type=int, default=None, help="grid size override")
    p_sim.add_argument("--quiet", action="store_true")
    p_sim.set_defaults(fn=cmd_simulate)

    p_cert = sub.add_parser("certify",
                            help="evaluate all isoperimetric inequalities on a curve")
    p_cert.add_argument("input",
                        help="run config JSON, snapshots.csv, or a run directory")
    p_cert.add_argument("--row", type=int, default=-1,
                        help="snapshot row to certify (default: last)")
    p_cert.add_argument("--grid", type=int, default=None, help="grid size override")
    p_cert.add_argument("--quiet", action="store_true")
    p_cert.set_defaults(fn=cmd_certify)

    p_self = sub.add_parser("selftest", help="run the acceptance suite")
    p_self.add_argument("--grid", type=int, default=None,
                        help="force a grid size (small grids must fail)")
    p_self.add_argument("--quiet", action="store_true")
    p_self.set_defaults(fn=cmd_selftest)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
