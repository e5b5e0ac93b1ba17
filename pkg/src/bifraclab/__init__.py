"""Numerical laboratory for two-weight inequalities of strong fractional
integrals on product domains."""

from .grid import ExponentConfig, Field, Grid, Rect, make_grid, sample
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ExponentConfig",
    "Field",
    "Grid",
    "Rect",
    "make_grid",
    "sample",
    "__version__",
]
