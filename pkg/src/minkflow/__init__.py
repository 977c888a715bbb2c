"""Curvature flow of convex curves in a Minkowski normed plane.

The plane is normed by a smooth, origin-symmetric, strictly convex unit
ball P given through its support function. Curves live in the theta gauge
(tangent parallel to the dual boundary point q(theta)) and are stored by
their curvature field; the flow module integrates the curvature PDE, and
the isoperimetry module certifies the inequalities the theory guarantees.
"""

from .ball import (
    SupportFunction,
    TangentChord,
    UnitBall,
    build_unit_ball,
    cross2,
    dual_norm,
    dual_support,
    minkowski_norm,
    tangent_chord,
)
from .curve import (
    ConvexCurve,
    CurveMetrics,
    closure_project,
    curve_from_curvature,
    inner_parallel,
    inscribed_circumscribed,
    integral_identity_residuals,
    median_curvature,
    metrics,
)
from .errors import (
    BallNotConvex,
    ClosureViolation,
    ConfigError,
    MinkflowError,
    NoBisectingChord,
    NonPositiveCurvature,
    NotSymmetric,
    RadiusTooLarge,
    SolverFailure,
    StepRejected,
    SupportFunctionError,
)
from .flow import (
    EvolutionResiduals,
    FlowResult,
    FlowState,
    SolverConfig,
    evolution_residuals,
    hausdorff_to_ball,
    initial_state,
    pde_rhs,
    reconstruct_frame,
    run_flow,
    snapshot_from_state,
    stable_dt,
    step,
    velocity_field,
)
from .isoperimetry import (
    IsoReport,
    bisection_deficit,
    bonnesen_gap,
    find_bisecting_chords,
    inequality_report,
    radii_deficit,
)
from .periodic import AngleGrid
from .records import SnapshotRecord, read_report, read_snapshots, write_snapshots

__version__ = "0.1.0"
