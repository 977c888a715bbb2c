"""Exception types shared across the package."""

from __future__ import annotations

import numpy as np


class MinkflowError(Exception):
    """Base class for all package errors."""


class SupportFunctionError(MinkflowError):
    """Invalid support-function specification (odd order, duplicate order, ...)."""


class BallNotConvex(MinkflowError):
    """Support function fails a > 0 or a + a'' > 0 somewhere on the grid."""

    def __init__(self, message: str, nodes: np.ndarray):
        super().__init__(f"{message}; offending nodes {list(nodes[:8])}"
                         + (" ..." if len(nodes) > 8 else ""))
        self.nodes = np.asarray(nodes)


class NonPositiveCurvature(MinkflowError):
    """Curvature samples must be strictly positive."""

    def __init__(self, nodes: np.ndarray):
        super().__init__(f"curvature not strictly positive at nodes {list(nodes[:8])}"
                         + (" ..." if len(nodes) > 8 else ""))
        self.nodes = np.asarray(nodes)


class ClosureViolation(MinkflowError):
    """First-harmonic moments of (a+a'')/k do not vanish: no closed curve."""

    def __init__(self, r_sin: float, r_cos: float, tol: float):
        super().__init__(
            f"closure residuals R_sin={r_sin:.3e}, R_cos={r_cos:.3e} exceed {tol:.3e}")
        self.r_sin = r_sin
        self.r_cos = r_cos
        self.tol = tol


class RadiusTooLarge(MinkflowError):
    """Inner-parallel radius at or beyond the minimum curvature radius."""


class NotSymmetric(MinkflowError):
    """Operation requires a curve symmetric about its centroid."""


class NoBisectingChord(MinkflowError):
    """Numerical failure of the area-bisecting chord scan."""


class StepRejected(MinkflowError):
    """A flow step would violate positivity or closure conservation."""


class SolverFailure(MinkflowError):
    """Step retries exhausted; carries everything recorded up to the failure."""

    def __init__(self, message: str, series=None, monitors=None, state=None):
        super().__init__(message)
        self.series = series or []
        self.monitors = monitors
        self.state = state


class ConfigError(MinkflowError):
    """Run configuration failed validation before any compute."""
