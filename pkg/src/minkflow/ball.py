"""The Minkowski unit ball P, its dual Q, and pointwise geometry.

The ball is described by its support function a(theta), stored as a
truncated Fourier series restricted to even harmonics (so the ball is
symmetric about the origin by construction) with exact derivatives.
Boundary points follow the tangent-angle parameterization

    p(theta) = a(theta) e_r + a'(theta) e_theta,
    q(theta) = e_theta / a(theta),

where e_r = (cos, sin) and e_theta = (-sin, cos). Brackets [u, v] are
2x2 determinants throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import BallNotConvex, SupportFunctionError
from .periodic import AngleGrid, refined_min, ring_integral


def cross2(u, v):
    """Bracket [u, v]: determinant of the 2x2 matrix with columns u, v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


class SupportFunction:
    """Support function of an origin-symmetric strictly convex body.

    a(theta) = sum_j  c_j cos(m_j theta) + s_j sin(m_j theta), all m_j even.
    Odd orders are rejected at construction; derivatives up to third order
    are evaluated analytically.
    """

    def __init__(self, orders, cos_coefs, sin_coefs):
        orders = np.asarray(orders, dtype=int)
        cos_coefs = np.asarray(cos_coefs, dtype=float)
        sin_coefs = np.asarray(sin_coefs, dtype=float)
        if not (orders.shape == cos_coefs.shape == sin_coefs.shape) or orders.ndim != 1:
            raise SupportFunctionError("orders and coefficients must be 1-D and equal length")
        if orders.size == 0:
            raise SupportFunctionError("at least the constant harmonic is required")
        if np.any(orders < 0):
            raise SupportFunctionError("harmonic orders must be nonnegative")
        odd = orders[orders % 2 == 1]
        if odd.size:
            raise SupportFunctionError(
                f"odd harmonic order {int(odd[0])} breaks origin symmetry; only even orders allowed")
        if np.unique(orders).size != orders.size:
            raise SupportFunctionError("duplicate harmonic orders")
        self.orders = orders
        self.cos_coefs = cos_coefs
        self.sin_coefs = np.where(orders == 0, 0.0, sin_coefs)
        self.cutoff = int(orders.max())

    @classmethod
    def from_harmonics(cls, harmonics) -> "SupportFunction":
        """Build from [[order, cos_coef, sin_coef], ...] as used in run configs."""
        try:
            triples = [(int(h[0]), float(h[1]), float(h[2])) for h in harmonics]
        except (TypeError, ValueError, IndexError) as exc:
            raise SupportFunctionError(f"malformed harmonics list: {exc}") from exc
        orders = [t[0] for t in triples]
        return cls(orders, [t[1] for t in triples], [t[2] for t in triples])

    def harmonics(self):
        return [[int(m), float(c), float(s)]
                for m, c, s in zip(self.orders, self.cos_coefs, self.sin_coefs)]

    def eval(self, theta, deriv: int = 0):
        """a(theta) or its derivative (deriv = 0..3), exact, vectorized."""
        if deriv not in (0, 1, 2, 3):
            raise ValueError("deriv must be 0..3")
        theta = np.asarray(theta, dtype=float)
        m = self.orders.astype(float)
        phase = np.multiply.outer(theta, m) + deriv * (np.pi / 2.0)
        scale = m**deriv
        out = np.cos(phase) @ (scale * self.cos_coefs) + np.sin(phase) @ (scale * self.sin_coefs)
        return float(out) if theta.ndim == 0 else out


def _frame(theta):
    theta = np.asarray(theta, dtype=float)
    e_r = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    e_t = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    return e_r, e_t


class UnitBall:
    """Unit ball geometry cached on an angle grid; immutable after construction.

    Cached per-node arrays: a and derivatives, boundary points p and q of P
    and its dual Q, brackets [p,p'] = a(a+a'') and [q,q'] = a^-2, and the
    coefficient fields of the curvature PDE. `area` is the enclosed area of P.
    """

    def __init__(self, support: SupportFunction, grid: AngleGrid):
        self.support = support
        self.grid = grid
        th = grid.theta
        self.a = support.eval(th)
        self.a1 = support.eval(th, 1)
        self.a2 = support.eval(th, 2)
        self.a3 = support.eval(th, 3)

        bad_pos = np.flatnonzero(~(self.a > 0))
        if bad_pos.size:
            raise BallNotConvex("support function not positive (a <= 0)", bad_pos)
        radius = self.a + self.a2
        bad_cvx = np.flatnonzero(~(radius > 0))
        if bad_cvx.size:
            raise BallNotConvex("boundary curvature not positive (a + a'' <= 0)", bad_cvx)

        e_r, e_t = _frame(th)
        self.e_r = e_r
        self.e_t = e_t
        self.p = self.a[:, None] * e_r + self.a1[:, None] * e_t
        self.q = e_t / self.a[:, None]
        self.bracket_pp = self.a * radius
        self.bracket_qq = self.a**-2
        self.diffusion_coef = self.a / radius
        self.advection_coef = 2.0 * self.a1 / radius
        self.area = 0.5 * ring_integral(self.bracket_pp, grid.dtheta)

        # constant of the median-curvature bound k* <= C L_Q / A
        q0 = float(np.max(np.hypot(self.q[:, 0], self.q[:, 1])))
        self.median_bound_constant = q0**2 * float(np.max(self.bracket_pp))

    # -- analytic evaluation at arbitrary angles ---------------------------

    def p_at(self, theta):
        e_r, e_t = _frame(theta)
        a = self.support.eval(theta)
        a1 = self.support.eval(theta, 1)
        return np.asarray(a)[..., None] * e_r + np.asarray(a1)[..., None] * e_t

    def q_at(self, theta):
        _, e_t = _frame(theta)
        return e_t / np.asarray(self.support.eval(theta))[..., None]

    def bracket_pp_at(self, theta):
        a = self.support.eval(theta)
        return a * (a + self.support.eval(theta, 2))


def build_unit_ball(support: SupportFunction, grid: AngleGrid) -> UnitBall:
    """Validate the support function on the grid and cache all ball geometry."""
    return UnitBall(support, grid)


def minkowski_norm(ball: UnitBall, v) -> float:
    """Gauge of v in the norm whose unit ball is P.

    Solves v = t * p(theta*) for the unique boundary ray: brackets the
    sign change of [p(theta), v] among grid nodes, then bisects on theta
    (<= 50 steps, tolerance 1e-12).
    """
    v = np.asarray(v, dtype=float)
    vnorm = float(np.hypot(v[0], v[1]))
    if vnorm == 0.0:
        return 0.0
    u = v / vnorm
    cr = ball.p[:, 0] * u[1] - ball.p[:, 1] * u[0]
    cr_next = np.roll(cr, -1)
    hits = np.flatnonzero((cr >= 0.0) & (cr_next < 0.0))
    if hits.size == 0:  # cannot happen for a valid ball
        raise ValueError("no bracketing interval found for direction search")
    i = int(hits[0])
    lo = ball.grid.theta[i]
    hi = lo + ball.grid.dtheta
    for _ in range(50):
        if hi - lo < 1e-12:
            break
        mid = 0.5 * (lo + hi)
        pm = ball.p_at(mid)
        if pm[0] * u[1] - pm[1] * u[0] >= 0.0:
            lo = mid
        else:
            hi = mid
    star = 0.5 * (lo + hi)
    p_star = ball.p_at(star)
    return vnorm / float(np.hypot(p_star[0], p_star[1]))


def dual_norm(ball: UnitBall, w) -> float:
    """Gauge of w in the dual norm (unit ball Q): max_theta [p(theta), w]."""
    w = np.asarray(w, dtype=float)
    values = ball.p[:, 0] * w[1] - ball.p[:, 1] * w[0]
    return -refined_min(-values)


def dual_support(ball: UnitBall, w, theta) -> float:
    """Bracket [w, q(theta)]: support of the dual pairing at one angle."""
    w = np.asarray(w, dtype=float)
    qv = ball.q_at(theta)
    return float(w[0] * qv[1] - w[1] * qv[0])


@dataclass(frozen=True)
class TangentChord:
    """Q-lengths of the two tangent segments, the arc, and their excess."""

    l1: float
    l2: float
    arc: float
    excess: float


def tangent_chord(ball: UnitBall, theta1: float, theta2: float) -> TangentChord:
    """Tangent-segment versus arc Q-lengths between two boundary angles.

    Requires 0 < theta2 - theta1 < pi (mod 2*pi). The excess
    l1 + l2 - arc is strictly positive for a strictly convex ball.
    """
    span = (theta2 - theta1) % (2.0 * np.pi)
    if span == 0.0:
        raise ValueError("degenerate chord: theta1 == theta2 (mod 2*pi)")
    if span >= np.pi:
        raise ValueError(f"angle span must lie in (0, pi); got {span:.6f}")
    q1 = ball.q_at(theta1)
    q2 = ball.q_at(theta1 + span)
    p1 = ball.p_at(theta1)
    p2 = ball.p_at(theta1 + span)
    denom = float(cross2(q1, q2))
    if abs(denom) < 1e-14:
        raise ValueError("antipodal tangents: [q(theta1), q(theta2)] vanishes")
    l1 = (1.0 - float(cross2(p1, q2))) / denom
    l2 = (1.0 - float(cross2(p2, q1))) / denom
    arc, _ = quad(ball.bracket_pp_at, theta1, theta1 + span,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return TangentChord(l1=l1, l2=l2, arc=arc, excess=l1 + l2 - arc)
