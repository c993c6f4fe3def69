"""Graph Ginzburg-Landau energies, their grid and continuum limits, and gradient flows."""
from .graph import WeightedGraph
from .potentials import DoubleWell, sigma_W, standard_well

__version__ = "0.1.0"

__all__ = ["WeightedGraph", "DoubleWell", "sigma_W", "standard_well", "__version__"]
