"""Hilbert geometry of properly convex domains and the dynamics of their automorphisms."""

__version__ = "0.1.0"
