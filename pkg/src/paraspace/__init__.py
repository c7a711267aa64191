"""Parameterized space complexity problems, oracles and reductions."""

__version__ = "0.1.0"
