"""Numerical verification toolkit for polyharmonic extensions of fractional Laplacians."""

__version__ = "0.1.0"
