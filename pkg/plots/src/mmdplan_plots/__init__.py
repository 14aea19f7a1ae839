"""Figure rendering for mmdplan simulation logs."""

from .errors import ParseError, RequestError
from .figures import FIGURE_KINDS, FigureRequest, render
from .logio import load_metrics_csv, load_run_log, load_surface_table

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "FigureRequest",
    "ParseError",
    "RequestError",
    "load_metrics_csv",
    "load_run_log",
    "load_surface_table",
    "render",
]
