"""Numerical verification of parametric integrals evaluated by differentiation
under the integral sign."""

__version__ = "0.1.0"
