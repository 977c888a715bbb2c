import numpy as np
import pytest

from minkflow.ball import (
    SupportFunction,
    build_unit_ball,
    cross2,
    dual_norm,
    dual_support,
    minkowski_norm,
    tangent_chord,
)
from minkflow.errors import BallNotConvex, SupportFunctionError
from minkflow.periodic import AngleGrid, spectral_derivative


@pytest.fixture(scope="module")
def grid():
    return AngleGrid(256)


@pytest.fixture(scope="module")
def euclid(grid):
    return build_unit_ball(SupportFunction.from_harmonics([[0, 1.0, 0.0]]), grid)


@pytest.fixture(scope="module")
def wavy(grid):
    return build_unit_ball(
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.2, 0.0]]), grid)


def test_support_function_rejects_odd_and_duplicate_orders():
    with pytest.raises(SupportFunctionError, match="odd harmonic order 3"):
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [3, 0.1, 0.0]])
    with pytest.raises(SupportFunctionError, match="duplicate"):
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.1, 0.0], [2, 0.0, 0.1]])
    with pytest.raises(SupportFunctionError):
        SupportFunction.from_harmonics([])


def test_support_function_derivatives_closed_form():
    sf = SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.2, 0.1]])
    th = np.linspace(0.0, 2 * np.pi, 13)
    assert np.allclose(sf.eval(th), 1 + 0.2 * np.cos(2 * th) + 0.1 * np.sin(2 * th), atol=1e-14)
    assert np.allclose(sf.eval(th, 1), -0.4 * np.sin(2 * th) + 0.2 * np.cos(2 * th), atol=1e-14)
    assert np.allclose(sf.eval(th, 2), -0.8 * np.cos(2 * th) - 0.4 * np.sin(2 * th), atol=1e-13)
    assert np.allclose(sf.eval(th, 3), 1.6 * np.sin(2 * th) - 0.8 * np.cos(2 * th), atol=1e-13)


def test_symmetry_is_structural():
    sf = SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.15, 0.07], [4, 0.02, 0.0]])
    th = np.linspace(0, 2 * np.pi, 37)
    assert np.max(np.abs(sf.eval(th + np.pi) - sf.eval(th))) < 1e-14


def test_euclid_area(euclid):
    assert euclid.area == pytest.approx(np.pi, abs=1e-12)


def test_wavy_area_closed_form(wavy):
    # Parseval: A(P) = pi*(c0^2 - sum m^2 (cm^2+sm^2)/2 + sum (cm^2+sm^2)/2)
    # for a = 1 + 0.2 cos 2t: pi*(1 + 0.04/2 - 4*0.04/2) = 0.94*pi
    assert wavy.area == pytest.approx(0.94 * np.pi, abs=1e-12)
    assert wavy.area == pytest.approx(2.9530970943744053, abs=1e-12)


def test_area_stable_under_refinement():
    for harmonics in ([[0, 1.0, 0.0], [2, 0.2, 0.0]],
                      [[0, 1.0, 0.0], [2, 0.12, 0.05], [4, 0.02, 0.0]]):
        sf = SupportFunction.from_harmonics(harmonics)
        a1 = build_unit_ball(sf, AngleGrid(256)).area
        a2 = build_unit_ball(sf, AngleGrid(512)).area
        assert abs(a1 - a2) < 1e-12


def test_nonconvex_ball_rejected_with_nodes(grid):
    # a + a'' = 1 - 1.2 cos 2t < 0 at t=0
    sf = SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.4, 0.0]])
    with pytest.raises(BallNotConvex, match="a \\+ a''") as err:
        build_unit_ball(sf, grid)
    assert 0 in err.value.nodes


def test_nonpositive_support_rejected(grid):
    sf = SupportFunction.from_harmonics([[0, 0.1, 0.0], [2, 0.4, 0.0]])
    with pytest.raises(BallNotConvex, match="not positive"):
        build_unit_ball(sf, grid)


def test_bracket_identities_against_finite_differences():
    # analytic brackets vs spectral derivatives of the cached boundary points
    ball = build_unit_ball(
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.12, 0.05], [4, 0.02, 0.0]]),
        AngleGrid(512))
    dp = np.column_stack([spectral_derivative(ball.p[:, 0]),
                          spectral_derivative(ball.p[:, 1])])
    dq = np.column_stack([spectral_derivative(ball.q[:, 0]),
                          spectral_derivative(ball.q[:, 1])])
    rel_pp = np.abs(cross2(ball.p, dp) - ball.bracket_pp) / ball.bracket_pp
    rel_qq = np.abs(cross2(ball.q, dq) - ball.bracket_qq) / ball.bracket_qq
    assert np.max(rel_pp) < 1e-10
    assert np.max(rel_qq) < 1e-10


def test_duality_round_trip():
    ball = build_unit_ball(
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.2, 0.0]]), AngleGrid(512))
    dq = np.column_stack([spectral_derivative(ball.q[:, 0]),
                          spectral_derivative(ball.q[:, 1])])
    residual = ball.p + ball.a[:, None] ** 2 * dq
    assert np.max(np.abs(residual)) < 1e-8 * np.max(np.abs(ball.p))


def test_minkowski_norm_euclidean(euclid):
    assert minkowski_norm(euclid, (3.0, 4.0)) == pytest.approx(5.0, abs=1e-12)
    assert minkowski_norm(euclid, (0.0, 0.0)) == 0.0


def test_boundary_points_have_unit_norm(wavy):
    for i in range(0, wavy.grid.n, 17):
        assert minkowski_norm(wavy, wavy.p[i]) == pytest.approx(1.0, abs=1e-10)


def test_norm_homogeneous_and_symmetric(wavy):
    rng = np.random.default_rng(3)
    for _ in range(50):
        v = rng.normal(size=2)
        n = minkowski_norm(wavy, v)
        assert minkowski_norm(wavy, 2.5 * v) == pytest.approx(2.5 * n, rel=1e-11)
        assert minkowski_norm(wavy, -v) == pytest.approx(n, rel=1e-11)


def test_triangle_inequality_on_random_pairs(wavy):
    rng = np.random.default_rng(11)
    u = rng.normal(size=(1000, 2))
    v = rng.normal(size=(1000, 2))
    for uu, vv in zip(u, v):
        lhs = minkowski_norm(wavy, uu + vv)
        rhs = minkowski_norm(wavy, uu) + minkowski_norm(wavy, vv)
        assert lhs <= rhs + 1e-10


def test_dual_support_values(euclid, wavy):
    th = 0.83
    e_r = np.array([np.cos(th), np.sin(th)])
    assert dual_support(euclid, e_r, th) == pytest.approx(1.0, abs=1e-14)
    q = wavy.q_at(th)
    assert dual_support(wavy, q, th) == pytest.approx(0.0, abs=1e-14)
    # [p(t), q(t)] = 1 for any ball
    assert dual_support(wavy, wavy.p_at(th), th) == pytest.approx(1.0, abs=1e-13)


def test_tangent_chord_euclidean_closed_form(euclid):
    tc = tangent_chord(euclid, 0.0, np.pi / 2)
    assert tc.l1 == pytest.approx(1.0, abs=1e-12)
    assert tc.l2 == pytest.approx(1.0, abs=1e-12)
    assert tc.arc == pytest.approx(np.pi / 2, abs=1e-12)
    assert tc.excess == pytest.approx(2.0 - np.pi / 2, abs=1e-12)

    tc = tangent_chord(euclid, 0.0, np.pi / 3)
    assert tc.l1 == pytest.approx(np.tan(np.pi / 6), abs=1e-12)
    assert tc.excess == pytest.approx(2 * np.tan(np.pi / 6) - np.pi / 3, abs=1e-12)


def test_tangent_chord_rejects_degenerate_and_wide(euclid):
    with pytest.raises(ValueError, match="degenerate"):
        tangent_chord(euclid, 1.0, 1.0)
    with pytest.raises(ValueError, match="span"):
        tangent_chord(euclid, 0.0, np.pi)


def test_tangent_chord_against_polyline_oracle():
    ball = build_unit_ball(
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.2, 0.0]]), AngleGrid(512))
    th1, th2 = 0.3, 0.3 + np.pi / 2
    tc = tangent_chord(ball, th1, th2)
    assert tc.excess > 0

    # oracle: intersect the two tangent lines, measure the polyline dually
    p1, p2 = ball.p_at(th1), ball.p_at(th2)
    q1, q2 = ball.q_at(th1), ball.q_at(th2)
    mat = np.column_stack([q1, -q2])
    t1, t2 = np.linalg.solve(mat, p2 - p1)
    vertex = p1 + t1 * q1
    l1_oracle = dual_norm(ball, vertex - p1)
    l2_oracle = dual_norm(ball, p2 - vertex)
    fine = np.linspace(th1, th2, 4001)
    pts = ball.p_at(fine)
    arc_oracle = sum(dual_norm(ball, d) for d in np.diff(pts, axis=0))
    # oracle resolution: grid-max refinement ~1e-7, polyline arc ~1e-6
    assert tc.l1 == pytest.approx(l1_oracle, abs=1e-6)
    assert tc.l2 == pytest.approx(l2_oracle, abs=1e-6)
    assert tc.arc == pytest.approx(arc_oracle, abs=1e-5)


def test_tangent_excess_positive_on_sampled_pairs():
    ball = build_unit_ball(
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.12, 0.05], [4, 0.02, 0.0]]),
        AngleGrid(256))
    rng = np.random.default_rng(5)
    for _ in range(100):
        th1 = rng.uniform(0, 2 * np.pi)
        span = rng.uniform(1e-2, np.pi - 1e-2)
        assert tangent_chord(ball, th1, th1 + span).excess > 0
