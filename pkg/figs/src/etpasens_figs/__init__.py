"""Offline figure scripts for etpasens CSV reports."""

from .csvdata import FigureDataError, read_rows
from .render import RenderSummary, render_ladder, render_method_comparison

__version__ = "0.1.0"
