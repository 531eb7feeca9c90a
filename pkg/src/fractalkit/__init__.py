"""Hausdorff-type contents and dimensions, Cantor sets, Lipschitz extension,
Hausdorff distance, monotone-function analysis and discrete functionals, all
on finite data."""

__version__ = "0.1.0"

from .errors import NonConvergenceError, PreconditionError
from .metric import FiniteMetricSpace, SetFamily, SubsetRef

__all__ = ["FiniteMetricSpace", "SetFamily", "SubsetRef", "PreconditionError", "NonConvergenceError"]
