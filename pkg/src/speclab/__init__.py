"""Spectral statistics of random covers of a genus-2 hyperbolic surface."""
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
