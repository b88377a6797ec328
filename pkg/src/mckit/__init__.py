"""Monte Carlo samplers, Gaussian quadrature, truncated moments, and Gibbs samplers."""

from . import errors
from .numerics import RngStream

__all__ = ["errors", "RngStream"]

__version__ = "0.1.0"
