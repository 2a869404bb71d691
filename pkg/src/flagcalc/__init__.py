"""Exact exterior calculus for flag structures on 3-manifolds."""

__version__ = "0.1.0"
