"""Fractal dimensions of elliptical polynomial spirals, in closed form and by construction."""

from .errors import ConvergenceError, DomainError, FactorizationError, PointBudgetExceeded
from .geometry import SampledArc, SpiralParams, point_at, sample_spiral
from . import covering, fbm, formulas, geometry, holder

__version__ = "0.1.0"
