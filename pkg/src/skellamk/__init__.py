"""Skellam-type point processes of order k: exact probabilities, Levy
measures, path simulation and Monte Carlo verification."""

from .processes import FAMILIES, ProcessSpec, parse_params
from .subordinators import SubordinatorSpec

__version__ = "0.1.0"

__all__ = ["FAMILIES", "ProcessSpec", "SubordinatorSpec", "parse_params", "__version__"]
