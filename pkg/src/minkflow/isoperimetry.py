"""Isoperimetric inequality certification.

Every quantity here is a slack that theory proves nonnegative for curves
in this class, vanishing exactly on P-circles:

  * iso_slack          L_Q^2/A - 4 A(P)
  * Bonnesen gap       g(r) = r L_Q - A - A(P) r^2   on [r_in, r_out]
  * radii deficit      1 + A(P) r_in r_out / A - 2 A(P)(r_in + r_out)/L_Q
                       (symmetric curves, radii measured from the centroid)
  * bisection deficit  sup over area-bisecting chords with parallel end
                       tangents of the length-weighted radii deficits of the
                       two halves reflected through the chord midpoint
  * Gage slacks        int k^2 ds - A(P) L_Q / A, plain and sharpened by
                       the (1 - bisection_deficit) factor.

A negative value beyond tolerance indicates a numerical bug, not new
mathematics.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .ball import cross2
from .curve import ConvexCurve, inscribed_circumscribed
from .errors import NoBisectingChord, NotSymmetric
from .periodic import refined_max, refined_min, ring_integral

log = logging.getLogger(__name__)

TOL_SYM = 1e-8
_DEGENERATE_REL = 1e-10   # max|h| below this times A: every central chord bisects
_AMBIGUOUS_REL = 1e-8     # non-crossing |h| minima below this times A get flagged
_FAN_CHORDS = 16


def bonnesen_gap(curve: ConvexCurve, r: float, radii: tuple[float, float] | None = None) -> float:
    """g(r) = r L_Q - A - A(P) r^2; nonnegative for r_in <= r <= r_out.

    Pass precomputed (r_in, r_out) to skip the optimizer; evaluation
    outside the certified range is permitted but logged.
    """
    if radii is None:
        radii = inscribed_circumscribed(curve)
    r_in, r_out = radii
    if not (r_in - 1e-12 <= r <= r_out + 1e-12):
        log.info("bonnesen_gap evaluated outside [r_in, r_out]: r=%g not in [%g, %g]",
                 r, r_in, r_out)
    return r * curve.length - curve.area - curve.ball.area * r**2


def _centered_radii(curve: ConvexCurve) -> tuple[float, float]:
    """Min and max of the centroid-based support: the symmetric-curve radii."""
    return refined_min(curve.support), refined_max(curve.support)


def radii_deficit(curve: ConvexCurve, tol_sym: float = TOL_SYM) -> float:
    """Scale-invariant circularity deficit of a centrally symmetric curve.

    Requires symmetry about the centroid (raises NotSymmetric otherwise);
    both extremal radii are then attained at the centroid.
    """
    defect = curve.symmetry_defect()
    if defect > tol_sym:
        raise NotSymmetric(
            f"symmetry defect {defect:.3e} exceeds {tol_sym:.1e} (relative to Q-length)")
    r_in, r_out = _centered_radii(curve)
    return _deficit_formula(curve.ball.area, r_in, r_out, curve.area, curve.length)


def _deficit_formula(ball_area, r_in, r_out, area, length):
    return 1.0 + ball_area * r_in * r_out / area - 2.0 * ball_area * (r_in + r_out) / length


def _bisect_area_roots(curve: ConvexCurve, lo: np.ndarray, hi: np.ndarray,
                       lo_positive: np.ndarray) -> np.ndarray:
    """Refine all bracketed sign changes of h at once (60 bisection steps)."""
    half = 0.5 * curve.area
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        same_side = (curve.sector_area(mid) - half >= 0.0) == lo_positive
        lo = np.where(same_side, mid, lo)
        hi = np.where(same_side, hi, mid)
    return 0.5 * (lo + hi)


def find_bisecting_chords(curve: ConvexCurve) -> tuple[list[float], bool]:
    """Angles theta in [0, pi) whose chord gamma(theta)->gamma(theta+pi) bisects the area.

    End tangents of such chords are parallel automatically (q(theta+pi) is
    antiparallel to q(theta)), so the search is one-dimensional: a grid scan
    for sign changes of the half-area mismatch h, refined by bisection.
    Returns (roots, ambiguous); ambiguous is set when h hugs zero without
    crossing (tangencies, or the fully symmetric case where h vanishes
    identically and a fixed fan of chords stands in for "all of them").
    """
    n2 = curve.grid.n // 2
    theta = curve.grid.theta[:n2]
    half = 0.5 * curve.area
    h = curve._sector_area_nodes - half
    scale = abs(half)

    if np.max(np.abs(h)) <= _DEGENERATE_REL * scale:
        stride = max(1, n2 // _FAN_CHORDS)
        return [float(t) for t in theta[::stride][:_FAN_CHORDS]], True

    # circular scan over [0, pi]; h(pi) = -h(0) by complementarity
    h_ext = np.append(h, -h[0])
    th_ext = np.append(theta, np.pi)
    positive = h_ext > 0.0
    exact = np.flatnonzero(h_ext[:n2] == 0.0)
    crossing = np.flatnonzero((positive[:n2] != positive[1:]) & (h_ext[:n2] != 0.0))
    roots = [float(th_ext[j]) for j in exact]
    if crossing.size:
        refined = _bisect_area_roots(curve, th_ext[crossing], th_ext[crossing + 1],
                                     positive[crossing])
        roots.extend(float(r) for r in refined)

    ambiguous = False
    absh = np.abs(h_ext)
    for j in range(1, n2):
        if absh[j] < _AMBIGUOUS_REL * scale and absh[j] <= absh[j - 1] and absh[j] <= absh[j + 1]:
            if positive[j - 1] == positive[j + 1]:
                ambiguous = True

    if not roots:
        raise NoBisectingChord("area-bisection scan found no sign change")
    return sorted(roots), ambiguous


def _half_deficit(curve: ConvexCurve, theta0: float) -> float:
    """Radii deficit of one half reflected through the chord midpoint.

    The reflected union is centrally symmetric about the midpoint, has the
    same enclosed area as the original curve (the chord bisects), twice the
    half's Q-length, and support samples that are pi-periodic copies of the
    half's, so sampling one half-window suffices.
    """
    n2 = curve.grid.n // 2
    phi = theta0 + curve.grid.dtheta * np.arange(n2)
    mid = 0.5 * (curve.gamma_at(theta0) + curve.gamma_at(theta0 + np.pi))
    f = cross2(curve.gamma_at(phi) - mid, curve.ball.q_at(phi))
    r_in, r_out = refined_min(f), refined_max(f)
    half_len = curve.arc_q_length(theta0, theta0 + np.pi)
    return _deficit_formula(curve.ball.area, r_in, r_out, curve.area, 2.0 * half_len)


def _node_arc_length(curve: ConvexCurve, j: int, span: int) -> float:
    """Q-length of the arc covering `span` grid cells starting at node j."""
    n = curve.grid.n
    cum = curve._cum_lam_nodes
    j %= n
    if j + span < n:
        return float(cum[j + span] - cum[j])
    return curve.length - float(cum[j] - cum[(j + span) % n])


def _half_deficit_node(curve: ConvexCurve, j: int) -> float:
    """Node-aligned fast path of _half_deficit (no trig-series evaluation)."""
    n = curve.grid.n
    n2 = n // 2
    j %= n
    idx = (j + np.arange(n2)) % n
    mid = 0.5 * (curve.vertices[j] + curve.vertices[(j + n2) % n])
    rel = curve.vertices[idx] - mid
    q = curve.ball.q[idx]
    f = rel[:, 0] * q[:, 1] - rel[:, 1] * q[:, 0]
    r_in, r_out = refined_min(f), refined_max(f)
    half_len = _node_arc_length(curve, j, n2)
    return _deficit_formula(curve.ball.area, r_in, r_out, curve.area, 2.0 * half_len)


def chord_deficits(curve: ConvexCurve, roots) -> list[float]:
    """Length-weighted reflected-half deficits, one per chord angle."""
    dtheta = curve.grid.dtheta
    out = []
    for th in roots:
        j = th / dtheta
        if abs(j - round(j)) < 1e-9:  # grid-aligned chord: pure node arithmetic
            j = int(round(j))
            n2 = curve.grid.n // 2
            l1 = _node_arc_length(curve, j, n2)
            e1 = _half_deficit_node(curve, j)
            e2 = _half_deficit_node(curve, j + n2)
        else:
            l1 = curve.arc_q_length(th, th + np.pi)
            e1 = _half_deficit(curve, th)
            e2 = _half_deficit(curve, th + np.pi)
        l2 = curve.length - l1
        out.append((l1 * e1 + l2 * e2) / curve.length)
    return out


def bisection_deficit(curve: ConvexCurve) -> float:
    """Supremum of the chord construction over all bisecting chords found."""
    roots, _ = find_bisecting_chords(curve)
    return max(chord_deficits(curve, roots))


@dataclass(frozen=True)
class IsoReport:
    """All certified slacks for one curve."""

    iso_ratio: float
    iso_slack: float
    r_in: float
    r_out: float
    bonnesen_at_rin: float
    bonnesen_at_rout: float
    int_k2_ds: float
    gage_slack: float
    refined_gage_slack: float
    bisection_deficit: float
    radii_deficit: float | None
    symmetric: bool
    chord_scan_ambiguous: bool

    def slack_values(self) -> dict[str, float]:
        """The quantities theory requires to be nonnegative."""
        out = {
            "iso_slack": self.iso_slack,
            "bonnesen_at_rin": self.bonnesen_at_rin,
            "bonnesen_at_rout": self.bonnesen_at_rout,
            "gage_slack": self.gage_slack,
            "refined_gage_slack": self.refined_gage_slack,
            "bisection_deficit": self.bisection_deficit,
        }
        if self.radii_deficit is not None:
            out["radii_deficit"] = self.radii_deficit
        return out

    def min_slack(self) -> float:
        return min(self.slack_values().values())

    def to_dict(self) -> dict:
        return asdict(self)


def inequality_report(curve: ConvexCurve, tol_sym: float = TOL_SYM) -> IsoReport:
    """Evaluate every inequality of the suite on one curve."""
    r_in, r_out = inscribed_circumscribed(curve)
    dtheta = curve.grid.dtheta
    int_k2 = ring_integral(curve.k**2 * curve.lam, dtheta)
    gage = int_k2 - curve.ball.area * curve.length / curve.area

    roots, ambiguous = find_bisecting_chords(curve)
    f_val = max(chord_deficits(curve, roots))

    symmetric = curve.symmetry_defect() <= tol_sym
    e_val = radii_deficit(curve, tol_sym) if symmetric else None

    return IsoReport(
        iso_ratio=curve.iso_ratio,
        iso_slack=curve.iso_ratio - 4.0 * curve.ball.area,
        r_in=r_in,
        r_out=r_out,
        bonnesen_at_rin=bonnesen_gap(curve, r_in, radii=(r_in, r_out)),
        bonnesen_at_rout=bonnesen_gap(curve, r_out, radii=(r_in, r_out)),
        int_k2_ds=int_k2,
        gage_slack=gage,
        refined_gage_slack=(1.0 - f_val) * int_k2 - curve.ball.area * curve.length / curve.area,
        bisection_deficit=f_val,
        radii_deficit=e_val,
        symmetric=symmetric,
        chord_scan_ambiguous=ambiguous,
    )
