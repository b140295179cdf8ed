"""Exact computations for BiHom-Lie conformal algebras over Q."""

from .kernels import BACKEND
from .poly import Poly, parse_poly

__version__ = "0.1.0"
__all__ = ["BACKEND", "Poly", "parse_poly", "__version__"]
