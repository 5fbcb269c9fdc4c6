"""Probabilistic degree of Boolean functions: constructions, reductions and exact checks at desk scale."""

__version__ = "0.1.0"
