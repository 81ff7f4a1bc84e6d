"""Computational kernel for intersections of Euclidean unit balls."""

__version__ = "0.1.0"
