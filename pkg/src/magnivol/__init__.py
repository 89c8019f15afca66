"""Magnitude of metric spaces and intrinsic volumes of convex bodies."""

__version__ = "0.1.0"
