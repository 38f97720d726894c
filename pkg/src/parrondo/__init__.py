"""Parrondo-type paradoxes for classical, hidden and quantum games."""

from .linalg import ConvergenceError, ValidationError

__version__ = "0.1.0"

__all__ = ["ConvergenceError", "ValidationError", "__version__"]
