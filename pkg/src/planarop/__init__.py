"""Planar orthogonal polynomials for |z-a|^{2c} e^{-N|z|^2}."""

__version__ = "0.1.0"
