"""Acceptance gate: one test per criterion, at the tolerances pinned in
minkflow.acceptance. Heavy runs are shared through the session context."""

import numpy as np
import pytest

from minkflow.acceptance import CRITERIA, run_all, run_criterion
from minkflow.ball import SupportFunction, build_unit_ball
from minkflow.curve import curve_from_curvature, integral_identity_residuals
from minkflow.periodic import AngleGrid


@pytest.mark.parametrize("name", [name for name, _title, _fn in CRITERIA])
def test_criterion(name, ctx):
    result = run_criterion(name, ctx)
    print(result.line())
    assert result.passed, result.line()


def test_under_resolved_grid_fails_the_suite():
    results = run_all(grid=16)
    assert any(not r.passed for r in results)


def test_tampered_ball_area_breaks_identity():
    ball = build_unit_ball(
        SupportFunction.from_harmonics([[0, 1.0, 0.0], [2, 0.2, 0.0]]), AngleGrid(256))
    curve = curve_from_curvature(ball, 1.0 + 0.1 * np.cos(4 * ball.grid.theta))
    assert abs(integral_identity_residuals(curve)[0]) <= 1e-8
    ball.area += 1e-3  # fault injection
    tampered = integral_identity_residuals(curve)[0]
    assert abs(tampered) > 1e-8
