"""Exact p-adic harmonic analysis and normalizing data for maximal parabolics."""

__version__ = "0.1.0"
