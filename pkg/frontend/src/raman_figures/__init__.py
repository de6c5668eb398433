"""Render scan and trace CSV artifacts into publication-style figures."""

from .render import FigureJob, MissingColumnError, render

__all__ = ["FigureJob", "MissingColumnError", "render"]
__version__ = "0.1.0"
