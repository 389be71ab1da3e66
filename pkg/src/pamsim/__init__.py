"""Exact classical simulability of prepare-and-measure correlations."""

__version__ = "0.1.0"
