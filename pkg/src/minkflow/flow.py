"""Curvature-driven flow in the theta gauge.

The curvature field evolves by the parabolic equation

    k_t = a/(a+a'') k^2 k_tt + 2a'/(a+a'') k^2 k_t + k^3      (theta gauge)

discretized with 4th-order central differences in theta and explicit RK4
in time under a parabolic step bound dt = sigma dtheta^2 / max(F k^2).
Two translation accumulators integrated alongside k recover the lab-frame
curve, whose velocity decomposes as -k p - a^2 k_theta q. Conservation of
the closure residuals, positivity of k, and monotonicity of the
isoperimetric ratio are monitored every accepted step; none of them is
ever corrected, so drift is itself a discretization test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ball import UnitBall
from .curve import ConvexCurve
from .errors import SolverFailure, StepRejected
from .isoperimetry import bisection_deficit
from .periodic import _shifted_indices, cumulative_samples, fd1, ring_integral
from .records import SnapshotRecord


@dataclass
class SolverConfig:
    """Time-stepping and stopping parameters (explicit RK4 scheme)."""

    sigma: float = 0.5                 # CFL safety factor in (0, 0.9]
    stop_area_fraction: float = 0.01   # stop once A(t) <= fraction * A(0)
    max_time: float = math.inf
    snapshot_every: int = 50           # accepted steps between snapshots
    tol_close: float = 1e-6            # closure residual bound, relative to L_Q
    tol_pos: float = 1e-8              # reporting margin for the curvature floor
    max_retries: int = 8               # per-step sigma halvings before giving up
    max_steps: int = 2_000_000

    def __post_init__(self):
        if not 0.0 < self.sigma <= 0.9:
            raise ValueError(f"sigma must lie in (0, 0.9], got {self.sigma}")
        if self.stop_area_fraction <= 0.0:
            raise ValueError("stop_area_fraction must be positive")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


def _gauge_scalars(ball: UnitBall, k: np.ndarray):
    """(L_Q, A, R_sin, R_cos) of the gauge curve, without building vertices.

    Uses exactly the same quadrature and spectral integration as
    ConvexCurve, so a later lazy construction reproduces these values
    bit for bit.
    """
    dtheta = ball.grid.dtheta
    mu = 1.0 / k
    speed = (ball.a + ball.a2) * mu
    sin_t, cos_t = -ball.e_t[:, 0], ball.e_t[:, 1]
    gx = -speed * sin_t
    gy = speed * cos_t
    r_sin = ring_integral(speed * sin_t, dtheta)
    r_cos = ring_integral(speed * cos_t, dtheta)
    length = ring_integral(ball.bracket_pp * mu, dtheta)
    x = cumulative_samples(gx)
    y = cumulative_samples(gy)
    area = 0.5 * ring_integral(x * gy - y * gx, dtheta)
    return length, area, r_sin, r_cos


@dataclass
class FlowState:
    """State after an accepted step: curvature field plus frame accumulators.

    `translation` holds the two time integrals (a(0) k(0,s) ds and
    [a(0) k_theta(0,s) + a'(0) k(0,s)] ds) that pin the lab frame; the
    gauge curve keeps gamma(0) at the origin. Cheap scalar metrics travel
    with the state; the full ConvexCurve is built lazily on first use.
    """

    t: float
    k: np.ndarray
    translation: np.ndarray
    ball: UnitBall
    k_floor: float
    length: float
    area: float
    closure_residuals: tuple[float, float]
    tol_close: float
    _curve: ConvexCurve | None = None

    @property
    def iso_ratio(self) -> float:
        return self.length**2 / self.area

    @property
    def curve(self) -> ConvexCurve:
        if self._curve is None:
            self._curve = ConvexCurve(self.ball, self.k, tol_close=self.tol_close)
        return self._curve


def pde_rhs(ball: UnitBall, k: np.ndarray) -> np.ndarray:
    """Right-hand side of the curvature equation on the grid.

    Both 4th-order stencils share one set of shifted views.
    """
    dtheta = ball.grid.dtheta
    f2, f1, b1, b2 = (k[i] for i in _shifted_indices(k.size))
    d1 = (-f2 + 8.0 * f1 - 8.0 * b1 + b2) / (12.0 * dtheta)
    d2 = (-f2 + 16.0 * f1 - 30.0 * k + 16.0 * b1 - b2) / (12.0 * dtheta**2)
    return k * k * (ball.diffusion_coef * d2 + ball.advection_coef * d1 + k)


def stable_dt(ball: UnitBall, k: np.ndarray, sigma: float) -> float:
    """Parabolic stability bound sigma * dtheta^2 / max(F k^2)."""
    return sigma * ball.grid.dtheta**2 / float(np.max(ball.diffusion_coef * k * k))


def _d1_at_zero(k: np.ndarray, dtheta: float) -> float:
    return (-k[2] + 8.0 * k[1] - 8.0 * k[-1] + k[-2]) / (12.0 * dtheta)


def initial_state(ball: UnitBall, k0, cfg: SolverConfig) -> FlowState:
    """Validate the initial curvature (positivity, closure) and wrap it."""
    k0 = np.asarray(k0, dtype=float)
    curve = ConvexCurve(ball, k0, tol_close=cfg.tol_close)
    return FlowState(t=0.0, k=curve.k, translation=np.zeros(2), ball=ball,
                     k_floor=float(k0.min()), length=curve.length, area=curve.area,
                     closure_residuals=curve.closure_residuals,
                     tol_close=cfg.tol_close, _curve=curve)


def step(state: FlowState, cfg: SolverConfig, sigma: float | None = None,
         dt_cap: float | None = None) -> FlowState:
    """One RK4 step; raises StepRejected near blow-up or closure loss.

    The translation accumulators are advanced with the same RK4 stages, so
    the lab frame carries the full time order of the scheme.
    """
    ball = state.ball
    dtheta = ball.grid.dtheta
    a0 = ball.a[0]
    a1_0 = ball.a1[0]

    dt = stable_dt(ball, state.k, cfg.sigma if sigma is None else sigma)
    if dt_cap is not None:
        dt = min(dt, dt_cap)

    def shift_rate(kf: np.ndarray) -> np.ndarray:
        return np.array([a0 * kf[0], a0 * _d1_at_zero(kf, dtheta) + a1_0 * kf[0]])

    k = state.k
    r1 = pde_rhs(ball, k)
    s1 = shift_rate(k)
    k2f = k + 0.5 * dt * r1
    r2 = pde_rhs(ball, k2f)
    s2 = shift_rate(k2f)
    k3f = k + 0.5 * dt * r2
    r3 = pde_rhs(ball, k3f)
    s3 = shift_rate(k3f)
    k4f = k + dt * r3
    r4 = pde_rhs(ball, k4f)
    s4 = shift_rate(k4f)

    k_new = k + (dt / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4)
    shift_new = state.translation + (dt / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4)

    if not np.all(np.isfinite(k_new)):
        raise StepRejected("non-finite curvature after step")
    if float(k_new.min()) <= 0.5 * state.k_floor:
        raise StepRejected(
            f"curvature {k_new.min():.4g} would cross half the initial minimum "
            f"{state.k_floor:.4g}: blow-up proximity or under-resolution")

    length, area, r_sin, r_cos = _gauge_scalars(ball, k_new)
    if max(abs(r_sin), abs(r_cos)) > cfg.tol_close * length:
        raise StepRejected(
            f"closure residuals ({r_sin:.3e}, {r_cos:.3e}) exceed "
            f"{cfg.tol_close:.1e} * L_Q = {cfg.tol_close * length:.3e}")

    return FlowState(t=state.t + dt, k=k_new, translation=shift_new, ball=ball,
                     k_floor=state.k_floor, length=length, area=area,
                     closure_residuals=(r_sin, r_cos), tol_close=cfg.tol_close)


def reconstruct_frame(state: FlowState) -> np.ndarray:
    """Lab-frame vertices: gauge curve shifted by the frame accumulators."""
    return state.curve.vertices - state.translation


def velocity_field(state: FlowState) -> np.ndarray:
    """Lab-frame velocity -k p - a^2 k_theta q at the grid nodes."""
    ball = state.ball
    k_theta = fd1(state.k, ball.grid.dtheta)
    return (-state.k[:, None] * ball.p
            - (ball.a**2 * k_theta)[:, None] * ball.q)


def hausdorff_to_ball(curve: ConvexCurve) -> float:
    """Hausdorff distance between the area-normalized centered curve and P.

    Convex bodies compare through their Euclidean support functions; in the
    theta gauge the boundary point with outward normal e_r(theta) is
    gamma(theta), so d_H = max |h_eta - a| over the grid.
    """
    scale = math.sqrt(curve.ball.area / curve.area)
    rel = curve.vertices - curve.centroid
    h_eta = scale * (rel[:, 0] * curve.ball.e_r[:, 0] + rel[:, 1] * curve.ball.e_r[:, 1])
    return float(np.max(np.abs(h_eta - curve.ball.a)))


def snapshot_from_state(state: FlowState) -> SnapshotRecord:
    """Full diagnostic record of one instant."""
    ball = state.ball
    curve = state.curve
    dtheta = ball.grid.dtheta
    ak = ball.a * state.k
    int_k2 = ring_integral(state.k**2 * curve.lam, dtheta)
    return SnapshotRecord(
        t=state.t,
        length=curve.length,
        area=curve.area,
        iso_ratio=curve.iso_ratio,
        int_k2=int_k2,
        r_sin=curve.closure_residuals[0],
        r_cos=curve.closure_residuals[1],
        J=ring_integral(ak**2 - fd1(ak, dtheta) ** 2, dtheta),
        W=ring_integral(ball.a * (ball.a + ball.a2) * np.log(state.k), dtheta),
        k_min=curve.k_min,
        k_max=curve.k_max,
        k_star=curve.k_star,
        bisection_deficit=bisection_deficit(curve),
        hausdorff=hausdorff_to_ball(curve),
        base=-state.translation.copy(),
        k=state.k.copy(),
    )


@dataclass
class RunMonitors:
    """Per-accepted-step extrema watched over a whole run."""

    max_closure_rel: float = 0.0
    min_positivity_margin: float = math.inf
    max_iso_step_increase: float = -math.inf
    steps: int = 0
    retries: int = 0
    status: str = "initial"


@dataclass
class FlowResult:
    """Everything a run produces: snapshots, monitors, final state, t_V."""

    series: list[SnapshotRecord]
    monitors: RunMonitors
    final_state: FlowState
    t_v_estimate: float
    states: list[FlowState] = field(default_factory=list)


def run_flow(ball: UnitBall, k0, cfg: SolverConfig,
             keep_states: bool = False) -> FlowResult:
    """Integrate until the enclosed area falls to the configured fraction.

    Rejected steps retry with halved sigma up to cfg.max_retries times;
    exhaustion raises SolverFailure carrying the series recorded so far.
    The vanishing-time estimate extrapolates the exact area law from the
    final accepted state: t_V = t + A(t) / (2 A(P)).
    """
    state = initial_state(ball, k0, cfg)
    area0 = state.area
    monitors = RunMonitors()
    series = [snapshot_from_state(state)]
    states = [state] if keep_states else []

    def observe(prev: FlowState, new: FlowState):
        closure_rel = max(abs(new.closure_residuals[0]),
                          abs(new.closure_residuals[1])) / new.length
        monitors.max_closure_rel = max(monitors.max_closure_rel, closure_rel)
        margin = float(new.k.min()) - new.k_floor
        monitors.min_positivity_margin = min(monitors.min_positivity_margin, margin)
        monitors.max_iso_step_increase = max(
            monitors.max_iso_step_increase, new.iso_ratio - prev.iso_ratio)

    since_snapshot = 0
    while (state.area > cfg.stop_area_fraction * area0
           and state.t < cfg.max_time and monitors.steps < cfg.max_steps):
        dt_cap = cfg.max_time - state.t if math.isfinite(cfg.max_time) else None
        sigma = cfg.sigma
        for attempt in range(cfg.max_retries + 1):
            try:
                new_state = step(state, cfg, sigma=sigma, dt_cap=dt_cap)
                break
            except StepRejected as exc:
                monitors.retries += 1
                sigma *= 0.5
                if attempt == cfg.max_retries:
                    monitors.status = "step_rejections_exhausted"
                    raise SolverFailure(
                        f"step retries exhausted at t={state.t:.6g}: {exc}",
                        series=series, monitors=monitors, state=state) from exc
        observe(state, new_state)
        state = new_state
        monitors.steps += 1
        since_snapshot += 1
        if since_snapshot >= cfg.snapshot_every:
            series.append(snapshot_from_state(state))
            if keep_states:
                states.append(state)
            since_snapshot = 0

    if since_snapshot:
        series.append(snapshot_from_state(state))
        if keep_states:
            states.append(state)
    monitors.status = ("area_target" if state.area <= cfg.stop_area_fraction * area0
                       else "max_time" if state.t >= cfg.max_time else "step_budget")
    t_v = state.t + state.area / (2.0 * ball.area)
    return FlowResult(series=series, monitors=monitors, final_state=state,
                      t_v_estimate=t_v, states=states)


@dataclass
class EvolutionResiduals:
    """Mismatch between differenced series and the proven evolution laws.

    Derivatives use the three-point nonuniform central formula at interior
    snapshots. Relative scales: |int k^2 ds| for dL/dt, 2 A(P) for dA/dt,
    and (2 L/A) int k^2 ds for the isoperimetric-ratio law (whose exact
    right side crosses zero as the curve rounds off).
    """

    times: np.ndarray
    d_length_rel: np.ndarray
    d_area_rel: np.ndarray
    d_iso_rel: np.ndarray

    @property
    def max_d_length_rel(self) -> float:
        return float(np.max(self.d_length_rel))

    @property
    def max_d_area_rel(self) -> float:
        return float(np.max(self.d_area_rel))

    @property
    def max_d_iso_rel(self) -> float:
        return float(np.max(self.d_iso_rel))


def _central_derivative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    hm = t[1:-1] - t[:-2]
    hp = t[2:] - t[1:-1]
    return (hm**2 * y[2:] - hp**2 * y[:-2] + (hp**2 - hm**2) * y[1:-1]) \
        / (hm * hp * (hm + hp))


def evolution_residuals(series: list[SnapshotRecord], ball_area: float) -> EvolutionResiduals:
    """Check dL/dt, dA/dt, and d(L^2/A)/dt against their exact laws."""
    if len(series) < 3:
        raise ValueError("need at least 3 snapshots to difference the series")
    t = np.array([rec.t for rec in series])
    length = np.array([rec.length for rec in series])
    area = np.array([rec.area for rec in series])
    iso = np.array([rec.iso_ratio for rec in series])
    int_k2 = np.array([rec.int_k2 for rec in series])[1:-1]

    dl = _central_derivative(t, length)
    da = _central_derivative(t, area)
    diso = _central_derivative(t, iso)

    li, ai = length[1:-1], area[1:-1]
    iso_rhs = -(2.0 * li / ai) * (int_k2 - ball_area * li / ai)
    iso_scale = (2.0 * li / ai) * int_k2
    return EvolutionResiduals(
        times=t[1:-1],
        d_length_rel=np.abs(dl + int_k2) / int_k2,
        d_area_rel=np.abs(da + 2.0 * ball_area) / (2.0 * ball_area),
        d_iso_rel=np.abs(diso - iso_rhs) / iso_scale,
    )
