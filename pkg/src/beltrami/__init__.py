"""Fundamental forms, third-form Beltrami operators and identity checks for surfaces in E^3.

Derivatives come from batched truncated-Taylor jets (:mod:`beltrami.jets`),
so every residual reported by the verifiers is a rounding-level quantity
rather than a discretization error.
"""

from .catalog import get_profile, get_surface
from .jets import Jet, seed
from .report import Grid, Report
from .surface import Frame, Immersion, frame

__version__ = "0.1.0"

__all__ = [
    "Frame",
    "Grid",
    "Immersion",
    "Jet",
    "Report",
    "__version__",
    "frame",
    "get_profile",
    "get_surface",
    "seed",
]
