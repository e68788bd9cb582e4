"""Integral string homology and string bracket of free loop spaces of spheres."""

__version__ = "0.1.0"
