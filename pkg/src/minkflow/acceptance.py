"""Executable acceptance suite.

Each criterion is a self-contained check returning pass/fail plus the
measured numbers; the CLI selftest and the pytest acceptance module both
run these. Heavy runs (the Euclidean reduction and the generic-ball flow)
are cached on a shared context. A grid override exists for fault
injection: forcing an under-resolved grid must make the suite fail.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ball import SupportFunction, build_unit_ball
from .curve import (
    ConvexCurve,
    closure_project,
    curve_from_curvature,
    inner_parallel,
    inscribed_circumscribed,
    integral_identity_residuals,
)
from .flow import (
    SolverConfig,
    evolution_residuals,
    initial_state,
    reconstruct_frame,
    run_flow,
    step,
    velocity_field,
)
from .isoperimetry import bonnesen_gap, inequality_report
from .periodic import AngleGrid

EUCLID_BALL = [[0, 1.0, 0.0]]
MAIN_BALL = [[0, 1.0, 0.0], [2, 0.2, 0.0]]
THIRD_BALL = [[0, 1.0, 0.0], [2, 0.12, 0.05], [4, 0.02, 0.0]]
RANDOM_SEED = 20260810


@dataclass
class CriterionResult:
    name: str
    title: str
    passed: bool
    detail: str
    elapsed: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{self.name:3s} {mark}  {self.title}: {self.detail} [{self.elapsed:.2f}s]"


class AcceptanceContext:
    """Caches the shared runs so criteria can reuse them."""

    def __init__(self, grid: int | None = None):
        self.grid_override = grid

    def n(self, default: int) -> int:
        return self.grid_override if self.grid_override is not None else default

    @cached_property
    def euclid(self):
        grid = AngleGrid(self.n(256))
        ball = build_unit_ball(SupportFunction.from_harmonics(EUCLID_BALL), grid)
        cfg = SolverConfig(sigma=0.5, stop_area_fraction=0.05, snapshot_every=20)
        start = time.perf_counter()
        result = run_flow(ball, np.ones(grid.n), cfg)
        return {"ball": ball, "result": result, "runtime": time.perf_counter() - start}

    @cached_property
    def main(self):
        grid = AngleGrid(self.n(256))
        ball = build_unit_ball(SupportFunction.from_harmonics(MAIN_BALL), grid)
        k0 = 1.0 + 0.3 * np.cos(4.0 * grid.theta)
        cfg = SolverConfig(sigma=0.5, stop_area_fraction=0.01, snapshot_every=50)
        result = run_flow(ball, k0, cfg)
        return {"ball": ball, "result": result,
                "residuals": evolution_residuals(result.series, ball.area)}

    @cached_property
    def refined(self):
        """N=512 companion of the main run, stopped at half the initial area."""
        grid = AngleGrid(self.n(512))
        ball = build_unit_ball(SupportFunction.from_harmonics(MAIN_BALL), grid)
        k0 = 1.0 + 0.3 * np.cos(4.0 * grid.theta)
        cfg = SolverConfig(sigma=0.5, stop_area_fraction=0.5, snapshot_every=50)
        result = run_flow(ball, k0, cfg)
        return {"ball": ball, "result": result,
                "residuals": evolution_residuals(result.series, ball.area)}

    @cached_property
    def random_curves(self):
        """Ten admissible curves over three balls, deterministic seed."""
        grid = AngleGrid(self.n(512))
        balls = [build_unit_ball(SupportFunction.from_harmonics(h), grid)
                 for h in (EUCLID_BALL, MAIN_BALL, THIRD_BALL)]
        rng = np.random.default_rng(RANDOM_SEED)
        curves = []
        for i in range(10):
            ball = balls[i % 3]
            mu = np.ones(grid.n)
            for j in range(1, 6):
                amp = 0.3 / j**2
                cj, sj = rng.uniform(-1.0, 1.0, 2) * amp
                mu += cj * np.cos(j * grid.theta) + sj * np.sin(j * grid.theta)
            mu = closure_project(ball, mu)
            curves.append((ball, curve_from_curvature(ball, 1.0 / mu), rng.uniform(-1, 1, 2)))
        return curves


def a1_euclidean_reduction(ctx: AcceptanceContext):
    """a=1, k0=1: A(t)=pi(1-2t), k(t)=(1-2t)^-1/2, t_V=1/2, under 5 s."""
    run = ctx.euclid["result"]
    err_area = max(abs(rec.area - np.pi * (1.0 - 2.0 * rec.t)) / (np.pi * (1.0 - 2.0 * rec.t))
                   for rec in run.series)
    err_k = max(float(np.max(np.abs(rec.k - (1.0 - 2.0 * rec.t) ** -0.5)))
                for rec in run.series)
    err_tv = abs(run.t_v_estimate - 0.5)
    runtime = ctx.euclid["runtime"]
    passed = err_area <= 1e-5 and err_k <= 1e-6 and err_tv <= 1e-5 and runtime <= 5.0
    return passed, (f"rel A err {err_area:.2e} (<=1e-5), k err {err_k:.2e} (<=1e-6), "
                    f"|t_V-0.5| {err_tv:.2e} (<=1e-5), runtime {runtime:.2f}s (<=5s)")


def a2_area_law(ctx: AcceptanceContext):
    """dA/dt = -2 A(P) within 1e-4 relative at every interior snapshot."""
    ball = ctx.main["ball"]
    err_ap = abs(ball.area - 0.94 * np.pi)
    res = ctx.main["residuals"]
    worst = res.max_d_area_rel
    passed = worst <= 1e-4 and err_ap <= 1e-12
    return passed, (f"max dA/dt residual {worst:.2e} (<=1e-4) over "
                    f"{res.times.size} interior snapshots; |A(P)-0.94pi| {err_ap:.1e}")


def a3_length_law(ctx: AcceptanceContext):
    """dL/dt = -int k^2 ds within 1e-3; residual halves (or better) at N=512."""
    res = ctx.main["residuals"]
    worst = res.max_d_length_rel
    fine = ctx.refined["residuals"]
    t_end = ctx.refined["result"].final_state.t
    window = res.times <= t_end
    coarse_window = float(np.max(res.d_length_rel[window])) if np.any(window) else worst
    fine_max = fine.max_d_length_rel
    passed = worst <= 1e-3 and fine_max <= 0.5 * coarse_window
    return passed, (f"max residual {worst:.2e} (<=1e-3); on common window t<= {t_end:.3f}: "
                    f"N=512 {fine_max:.2e} vs N=256 {coarse_window:.2e} "
                    f"(ratio {fine_max / coarse_window:.3f} <= 0.5)")


def a4_iso_convergence(ctx: AcceptanceContext):
    """Iso ratio nonincreasing (1e-10 per step), final within 2% of 4 A(P)."""
    run = ctx.main["result"]
    ball = ctx.main["ball"]
    inc = run.monitors.max_iso_step_increase
    final = run.series[-1].iso_ratio
    lo, hi = 4.0 * ball.area, 4.0 * ball.area * 1.02
    passed = inc <= 1e-10 and lo <= final <= hi
    return passed, (f"max per-step increase {inc:.2e} (<=1e-10); "
                    f"final iso {final:.6f} in [{lo:.6f}, {hi:.6f}]")


def a5_identity_suite(ctx: AcceptanceContext):
    """Arclength-integral identities on 10 random curves, residuals <= 1e-8."""
    worst = 0.0
    for _ball, curve, probe in ctx.random_curves:
        res = integral_identity_residuals(curve)
        worst = max(worst, max(abs(v) for v in res))
        origin = curve.centroid + 0.1 * probe
        res_moved = integral_identity_residuals(curve, origin=origin)
        worst = max(worst, abs(res_moved[1]), abs(res_moved[2]))
    return worst <= 1e-8, f"max |identity residual| {worst:.2e} (<=1e-8, incl. moved origin)"


def a6_inequality_suite(ctx: AcceptanceContext):
    """All slacks >= -1e-8 and the median-curvature bound, curves and snapshots."""
    floor = -1e-8
    worst_slack = np.inf
    worst_median = -np.inf
    for ball, curve, _probe in ctx.random_curves:
        rep = inequality_report(curve)
        worst_slack = min(worst_slack, rep.min_slack())
        bound = ball.median_bound_constant * curve.length / curve.area
        worst_median = max(worst_median, curve.k_star - bound)
    ball = ctx.main["ball"]
    for rec in ctx.main["result"].series:
        curve = ConvexCurve(ball, rec.k)
        r_in, r_out = inscribed_circumscribed(curve)
        slacks = [
            rec.iso_ratio - 4.0 * ball.area,
            bonnesen_gap(curve, r_in, radii=(r_in, r_out)),
            bonnesen_gap(curve, r_out, radii=(r_in, r_out)),
            (1.0 - rec.bisection_deficit) * rec.int_k2 - ball.area * rec.length / rec.area,
        ]
        worst_slack = min(worst_slack, min(slacks))
        bound = ball.median_bound_constant * rec.length / rec.area
        worst_median = max(worst_median, rec.k_star - bound)
    passed = worst_slack >= floor and worst_median <= 1e-8
    return passed, (f"min slack {worst_slack:.2e} (>=-1e-8); "
                    f"max (k* - C L/A) {worst_median:.2e} (<=1e-8)")


def a7_conservation(ctx: AcceptanceContext):
    """Closure conserved, J nondecreasing, curvature floor preserved."""
    run = ctx.main["result"]
    closure = run.monitors.max_closure_rel
    margin = run.monitors.min_positivity_margin
    js = [rec.J for rec in run.series]
    j_drop = max((js[i] - js[i + 1]) / (1.0 + abs(js[i])) for i in range(len(js) - 1))
    passed = closure <= 1e-6 and margin >= -1e-8 and j_drop <= 1e-8
    return passed, (f"max closure residual {closure:.2e} * L_Q (<=1e-6); "
                    f"min k margin {margin:.2e} (>=-1e-8); "
                    f"max J drop {j_drop:.2e} (<=1e-8)")


def a8_frame_velocity(ctx: AcceptanceContext):
    """Forward-difference frame velocity matches -k p - a^2 k_theta q to 5 dt.

    The ball has a'(0) != 0 and the curve k_theta != 0, so both frame
    accumulators and the tangential velocity term are active; the
    forward-difference constant stays ~2 for this data (it grows with
    the third spatial derivative of k, which the 5 dt budget caps).
    """
    grid = AngleGrid(ctx.n(256))
    ball = build_unit_ball(SupportFunction.from_harmonics(THIRD_BALL), grid)
    k0 = 1.0 + 0.1 * np.cos(2.0 * grid.theta)
    cfg = SolverConfig(sigma=0.25, stop_area_fraction=0.01)
    state = initial_state(ball, k0, cfg)
    for _ in range(40):
        state = step(state, cfg)
    model = velocity_field(state)
    after = step(state, cfg)
    dt = after.t - state.t
    fd = (reconstruct_frame(after) - reconstruct_frame(state)) / dt
    err = float(np.max(np.hypot(*(fd - model).T)))
    passed = err <= 5.0 * dt
    return passed, f"max |FD - formula| {err:.3e} <= 5*dt = {5.0 * dt:.3e}"


def a9_offset_laws(ctx: AcceptanceContext):
    """Offset Q-length linear law to 1e-8; area recovered from offsets to 1e-4."""
    grid = AngleGrid(ctx.n(256))
    ball = build_unit_ball(SupportFunction.from_harmonics(MAIN_BALL), grid)
    curve = curve_from_curvature(ball, 1.0 + 0.04 * np.cos(4.0 * grid.theta))
    worst_lin = 0.0
    for frac in (0.1, 0.5, 0.9):
        r = frac * curve.mu0
        off = inner_parallel(curve, r)
        worst_lin = max(worst_lin, abs(off.length - (curve.length - 2.0 * ball.area * r)))
    r_in, _ = inscribed_circumscribed(curve)
    nodes, weights = np.polynomial.legendre.leggauss(200)
    rs = 0.5 * r_in * (nodes + 1.0)
    weights = 0.5 * r_in * weights
    # beyond mu0 the offset develops corners (out of scope); there the linear
    # law bounds Q-length from above with total error exactly g(r_in) >= 0,
    # below 1e-4*A for this mildly non-circular curve
    lengths = np.array([
        inner_parallel(curve, r).length if r < curve.mu0 * (1.0 - 1e-9)
        else curve.length - 2.0 * ball.area * r
        for r in rs
    ])
    integral = float(lengths @ weights)
    err_area = abs(integral - curve.area) / curve.area
    passed = worst_lin <= 1e-8 and err_area <= 1e-4
    return passed, (f"max |L(r) - (L - 2A(P)r)| {worst_lin:.2e} (<=1e-8); "
                    f"area integral rel err {err_area:.2e} (<=1e-4)")


CRITERIA = [
    ("A1", "Euclidean reduction", a1_euclidean_reduction),
    ("A2", "area law", a2_area_law),
    ("A3", "length law + refinement", a3_length_law),
    ("A4", "isoperimetric convergence", a4_iso_convergence),
    ("A5", "identity suite", a5_identity_suite),
    ("A6", "inequality suite", a6_inequality_suite),
    ("A7", "conservation/monotonicity", a7_conservation),
    ("A8", "frame velocity", a8_frame_velocity),
    ("A9", "offset laws", a9_offset_laws),
]


def run_criterion(name: str, ctx: AcceptanceContext) -> CriterionResult:
    for cname, title, fn in CRITERIA:
        if cname == name:
            start = time.perf_counter()
            try:
                passed, detail = fn(ctx)
            except Exception as exc:  # fault injection must fail, not crash
                passed, detail = False, f"raised {type(exc).__name__}: {exc}"
            return CriterionResult(cname, title, passed, detail,
                                   time.perf_counter() - start)
    raise KeyError(name)


def run_all(grid: int | None = None, echo=None) -> list[CriterionResult]:
    ctx = AcceptanceContext(grid)
    results = []
    for name, _title, _fn in CRITERIA:
        result = run_criterion(name, ctx)
        results.append(result)
        if echo is not None:
            echo(result.line())
    return results
