"""Offline figure generation for one-bit sinusoid estimation outputs:
renders the benchmark CSV and estimate-report JSON files produced by the
estimation package into publication-style figures."""

from .figures import KINDS, FigureSpec, SchemaError, build_figure, render

__version__ = "0.1.0"

__all__ = ["KINDS", "FigureSpec", "SchemaError", "build_figure", "render"]
