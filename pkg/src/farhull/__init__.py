"""Exact algebraic hulls, Reidemeister dynamics and BS(1,n) automorphisms for FAR groups."""

__version__ = "0.1.0"
