"""Run configuration: JSON parsing and validation before any compute."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ball import SupportFunction, UnitBall, build_unit_ball
from .errors import ConfigError
from .flow import SolverConfig
from .periodic import AngleGrid


def harmonic_samples(harmonics, theta: np.ndarray) -> np.ndarray:
    """Evaluate sum of c*cos(m theta) + s*sin(m theta) triples on a grid."""
    out = np.zeros_like(theta)
    for h in harmonics:
        try:
            m, c, s = int(h[0]), float(h[1]), float(h[2])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"malformed harmonic entry {h!r}: {exc}") from exc
        if m < 0:
            raise ConfigError(f"harmonic order must be nonnegative, got {m}")
        out += c * np.cos(m * theta) + s * np.sin(m * theta)
    return out


@dataclass
class RunConfig:
    """Validated run parameters: ball, initial curvature, grid, solver, output."""

    ball_harmonics: list
    curvature_harmonics: list
    grid: int = 256
    solver: SolverConfig = field(default_factory=SolverConfig)
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict, *, grid: int | None = None, out: str | None = None,
                  snapshots_every: int | None = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        try:
            ball_harmonics = data["ball"]["harmonics"]
            curvature_harmonics = data["curvature"]["harmonics"]
        except (KeyError, TypeError) as exc:
            raise ConfigError(
                "config must provide ball.harmonics and curvature.harmonics") from exc
        solver_data = dict(data.get("solver", {}))
        if snapshots_every is not None:
            solver_data["snapshot_every"] = snapshots_every
        try:
            solver = SolverConfig(**solver_data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad solver parameters: {exc}") from exc
        grid_n = grid if grid is not None else data.get("grid", 256)
        try:
            grid_n = int(grid_n)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid must be an integer: {exc}") from exc
        return cls(
            ball_harmonics=ball_harmonics,
            curvature_harmonics=curvature_harmonics,
            grid=grid_n,
            solver=solver,
            out=out if out is not None else data.get("out"),
        )

    @classmethod
    def from_file(cls, path, **overrides) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data, **overrides)

    def make_grid(self) -> AngleGrid:
        try:
            return AngleGrid(self.grid)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def make_ball(self) -> UnitBall:
        support = SupportFunction.from_harmonics(self.ball_harmonics)
        return build_unit_ball(support, self.make_grid())

    def initial_curvature(self, ball: UnitBall) -> np.ndarray:
        return harmonic_samples(self.curvature_harmonics, ball.grid.theta)
