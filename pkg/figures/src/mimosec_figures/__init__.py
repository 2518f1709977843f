"""Offline figure rendering for mimosec sweep results."""

from .render import BER_FLOOR, FIGURE_KINDS, FigureSpec, SchemaError, render

__version__ = "0.1.0"
