"""Offline rendering of curvature-flow run outputs into figures."""

from .figures import FIGURE_KINDS, frames_figure, normalized_figure, render, series_figure
from .io import PlotkitError, list_frames, read_frame, read_report, read_series

__version__ = "0.1.0"
