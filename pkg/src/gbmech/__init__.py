"""Truthful scheduling mechanisms for stars, hyperstars, graphs and multigraphs."""
from gbmech.kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
