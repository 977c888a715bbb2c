"""Closed strictly convex curves stored by their Minkowski curvature.

A curve is a positive curvature field k(theta) on the angle grid plus a
base point; vertices are always derived. In the theta gauge the tangent
is gamma'(theta) = lambda(theta) q(theta) with Q-speed
lambda = [p,p']/k, so

    gamma'(theta) = (a + a'')/k * (-sin theta, cos theta),

and k is the curvature of a closed curve iff both first-harmonic moments
of (a+a'')/k vanish. Construction integrates gamma' spectrally and
verifies those closure residuals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from .ball import UnitBall, cross2
from .errors import ClosureViolation, NonPositiveCurvature, RadiusTooLarge
from .periodic import (
    CumulativeTrig,
    cumulative_samples,
    halfwindow_minima,
    refined_max,
    refined_min,
    ring_integral,
    spectral_derivative,
)

log = logging.getLogger(__name__)

DEFAULT_TOL_CLOSE = 1e-6


class ConvexCurve:
    """Smooth, simple, closed, strictly convex curve in the theta gauge.

    Immutable after construction. Cheap metrics (Q-length, area,
    isoperimetric ratio) are computed eagerly; evaluators and shape
    statistics are cached lazily.
    """

    def __init__(self, ball: UnitBall, curvature, base=(0.0, 0.0),
                 tol_close: float = DEFAULT_TOL_CLOSE):
        k = np.array(curvature, dtype=float)
        if k.shape != (ball.grid.n,):
            raise ValueError(f"curvature must have shape ({ball.grid.n},), got {k.shape}")
        bad = np.flatnonzero(~(k > 0.0))
        if bad.size:
            raise NonPositiveCurvature(bad)

        self.ball = ball
        self.grid = ball.grid
        self.k = k
        self.tol_close = tol_close
        self.base = np.array(base, dtype=float)

        dtheta = self.grid.dtheta
        mu = 1.0 / k                      # curvature radius
        self.mu = mu
        self.lam = ball.bracket_pp * mu   # Q-speed
        self.length = ring_integral(self.lam, dtheta)

        speed = (ball.a + ball.a2) * mu   # |gamma'| in the e_theta direction
        sin_t, cos_t = -ball.e_t[:, 0], ball.e_t[:, 1]
        self.closure_residuals = (
            ring_integral(speed * sin_t, dtheta),
            ring_integral(speed * cos_t, dtheta),
        )
        r_max = max(abs(self.closure_residuals[0]), abs(self.closure_residuals[1]))
        if not r_max <= tol_close * self.length:
            raise ClosureViolation(*self.closure_residuals, tol_close * self.length)

        self.tangent = speed[:, None] * ball.e_t           # gamma'(theta_i)
        self.vertices = self.base + np.column_stack(
            [cumulative_samples(self.tangent[:, 0]), cumulative_samples(self.tangent[:, 1])]
        )
        self.area = 0.5 * ring_integral(cross2(self.vertices, self.tangent), dtheta)
        self.iso_ratio = self.length**2 / self.area

        self.k_min = float(k.min())
        self.k_max = float(k.max())
        self.mu0 = 1.0 / self.k_max

    # -- lazy geometry ------------------------------------------------------

    @cached_property
    def centroid(self) -> np.ndarray:
        """Area centroid of the enclosed region (Green's theorem moments)."""
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        dx, dy = self.tangent[:, 0], self.tangent[:, 1]
        dtheta = self.grid.dtheta
        mx = 0.5 * ring_integral(x**2 * dy, dtheta)
        my = -0.5 * ring_integral(y**2 * dx, dtheta)
        return np.array([mx / self.area, my / self.area])

    @cached_property
    def support(self) -> np.ndarray:
        """Support samples f_i = [gamma_i - centroid, q_i]."""
        return cross2(self.vertices - self.centroid, self.ball.q)

    @cached_property
    def k_star(self) -> float:
        """Median curvature: largest level exceeded on a half-period window."""
        return float(np.max(halfwindow_minima(self.k)))

    @cached_property
    def _cum_x(self) -> CumulativeTrig:
        return CumulativeTrig(self.tangent[:, 0])

    @cached_property
    def _cum_y(self) -> CumulativeTrig:
        return CumulativeTrig(self.tangent[:, 1])

    @cached_property
    def _cum_lam(self) -> CumulativeTrig:
        return CumulativeTrig(self.lam)

    @cached_property
    def _cum_cross(self) -> CumulativeTrig:
        return CumulativeTrig(cross2(self.vertices, self.tangent))

    def gamma_at(self, theta):
        """Vertex position at arbitrary angle(s), via the trig interpolant."""
        theta = np.asarray(theta, dtype=float)
        return self.base + np.stack([self._cum_x(theta), self._cum_y(theta)], axis=-1)

    def arc_q_length(self, theta1: float, theta2: float) -> float:
        """Q-length of the arc from theta1 to theta2 (theta2 >= theta1)."""
        return float(self._cum_lam(theta2) - self._cum_lam(theta1))

    def sector_area(self, theta):
        """Signed area of the piece cut off by the chord gamma(theta) -> gamma(theta+pi).

        Accepts scalar or array angles.
        """
        theta = np.asarray(theta, dtype=float)
        swept = self._cum_cross(theta + np.pi) - self._cum_cross(theta)
        g1 = self.gamma_at(theta)
        g2 = self.gamma_at(theta + np.pi)
        out = 0.5 * (swept + cross2(g2, g1))
        return float(out) if theta.ndim == 0 else out

    @cached_property
    def _sector_area_nodes(self) -> np.ndarray:
        """sector_area at the first n/2 grid nodes, from node arrays only."""
        n2 = self.grid.n // 2
        cum = cumulative_samples(cross2(self.vertices, self.tangent))
        chord = cross2(np.roll(self.vertices, -n2, axis=0), self.vertices)[:n2]
        return 0.5 * (cum[n2:] - cum[:n2] + chord)

    @cached_property
    def _cum_lam_nodes(self) -> np.ndarray:
        """Q-arclength s(theta_i) at the grid nodes."""
        return cumulative_samples(self.lam)

    def symmetry_defect(self) -> float:
        """max_i |gamma_i + gamma_{i+n/2} - 2 centroid|, relative to Q-length."""
        n2 = self.grid.n // 2
        mism = self.vertices + np.roll(self.vertices, -n2, axis=0) - 2.0 * self.centroid
        return float(np.max(np.hypot(mism[:, 0], mism[:, 1]))) / self.length

    def recomputed_curvature(self) -> np.ndarray:
        """Curvature re-derived from the built vertices.

        Differentiates the vertex stream (linear drift plus periodic part),
        projects onto the q direction using [p, q] = 1, and inverts the
        Q-speed: lambda = [p, gamma'], k = [p, p'] / lambda.
        """
        theta = self.grid.theta
        rel = self.vertices - self.base
        d = np.empty_like(rel)
        for j, cum in enumerate((self._cum_x, self._cum_y)):
            periodic = rel[:, j] - cum.slope * theta
            d[:, j] = cum.slope + spectral_derivative(periodic)
        lam = cross2(self.ball.p, d)
        return self.ball.bracket_pp / lam


def curve_from_curvature(ball: UnitBall, curvature, base=(0.0, 0.0),
                         tol_close: float = DEFAULT_TOL_CLOSE) -> ConvexCurve:
    """Build the closed curve with the given curvature field and gamma(0) = base."""
    return ConvexCurve(ball, curvature, base=base, tol_close=tol_close)


def closure_project(ball: UnitBall, radius_samples) -> np.ndarray:
    """Smallest first-harmonic correction making a radius field admissible.

    Solves for alpha, beta such that mu + alpha sin + beta cos has vanishing
    first-harmonic moments against the weight (a + a''); returns the
    corrected curvature-radius samples (reciprocal of curvature).
    """
    mu = np.asarray(radius_samples, dtype=float)
    w = ball.a + ball.a2
    s, c = -ball.e_t[:, 0], ball.e_t[:, 1]
    dtheta = ball.grid.dtheta
    gram = np.array([
        [ring_integral(w * s * s, dtheta), ring_integral(w * s * c, dtheta)],
        [ring_integral(w * c * s, dtheta), ring_integral(w * c * c, dtheta)],
    ])
    rhs = -np.array([ring_integral(w * mu * s, dtheta), ring_integral(w * mu * c, dtheta)])
    alpha, beta = np.linalg.solve(gram, rhs)
    return mu + alpha * s + beta * c


@dataclass(frozen=True)
class CurveMetrics:
    """Scalar shape statistics of one curve."""

    length: float
    area: float
    iso_ratio: float
    k_min: float
    k_max: float
    mu0: float
    k_star: float
    r_in: float
    r_out: float


def metrics(curve: ConvexCurve) -> CurveMetrics:
    """Full metric record, including inscribed/circumscribed radii."""
    r_in, r_out = inscribed_circumscribed(curve)
    return CurveMetrics(
        length=curve.length,
        area=curve.area,
        iso_ratio=curve.iso_ratio,
        k_min=curve.k_min,
        k_max=curve.k_max,
        mu0=curve.mu0,
        k_star=curve.k_star,
        r_in=r_in,
        r_out=r_out,
    )


def integral_identity_residuals(curve: ConvexCurve, origin=None):
    """Residuals of the three arclength-integral identities.

    With f the support about `origin` (default: area centroid) and ds the
    Q-arclength element:

        int k ds  = 2 * area(P)
        int f ds  = 2 * A
        int fk ds = L_Q

    Returns the three residuals (integral minus right-hand side). The
    second and third hold for any interior origin.
    """
    dtheta = curve.grid.dtheta
    if origin is None:
        f = curve.support
    else:
        f = cross2(curve.vertices - np.asarray(origin, dtype=float), curve.ball.q)
    i_curv = ring_integral(curve.k * curve.lam, dtheta) - 2.0 * curve.ball.area
    i_supp = ring_integral(f * curve.lam, dtheta) - 2.0 * curve.area
    i_mixed = ring_integral(f * curve.k * curve.lam, dtheta) - curve.length
    return i_curv, i_supp, i_mixed


def median_curvature(curve: ConvexCurve) -> float:
    """Largest curvature level exceeded on some window of angular length pi."""
    return curve.k_star


def _support_about(curve: ConvexCurve, center) -> np.ndarray:
    return cross2(curve.vertices - np.asarray(center, dtype=float), curve.ball.q)


def inscribed_circumscribed(curve: ConvexCurve, coarse: int = 20,
                            max_iter: int = 200) -> tuple[float, float]:
    """Radii of the largest inscribed and smallest circumscribed P-circles.

    For a center x the largest inscribed radius is min_theta [gamma - x, q]
    (concave in x) and the smallest circumscribed is max_theta (convex in x);
    both are optimized by a coarse grid over the bounding box followed by
    Nelder-Mead refinement.
    """
    lo = curve.vertices.min(axis=0)
    hi = curve.vertices.max(axis=0)
    gx = np.linspace(lo[0], hi[0], coarse)
    gy = np.linspace(lo[1], hi[1], coarse)
    centers = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
    rel = curve.vertices[None, :, :] - centers[:, None, :]
    f_all = rel[:, :, 0] * curve.ball.q[None, :, 1] - rel[:, :, 1] * curve.ball.q[None, :, 0]

    def solve(objective, start):
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"maxiter": max_iter, "xatol": 1e-9, "fatol": 1e-9})
        if not res.success:
            log.warning("radius optimizer hit the iteration cap; using best point found")
        return -res.fun

    start_in = centers[int(np.argmax(f_all.min(axis=1)))]
    r_in = solve(lambda x: -refined_min(_support_about(curve, x)), start_in)
    start_out = centers[int(np.argmin(f_all.max(axis=1)))]
    r_out = -solve(lambda x: refined_max(_support_about(curve, x)), start_out)
    return float(r_in), float(r_out)


def inner_parallel(curve: ConvexCurve, r: float) -> ConvexCurve:
    """Inner parallel curve at Minkowski distance r (smooth regime only).

    The offset has curvature radius mu - r, i.e. curvature k/(1 - r k);
    requires 0 <= r < mu0 so no corners form.
    """
    if r < 0.0:
        raise RadiusTooLarge(f"offset distance must be nonnegative, got {r}")
    if r >= curve.mu0:
        raise RadiusTooLarge(
            f"offset r={r:.6g} reaches the minimum curvature radius mu0={curve.mu0:.6g}; "
            "corners would form")
    k_off = curve.k / (1.0 - r * curve.k)
    base = curve.vertices[0] - r * curve.ball.p[0]
    return ConvexCurve(curve.ball, k_off, base=base, tol_close=curve.tol_close)
