"""Exact and certified spread computations for finite permutation groups,
with fixed point ratio and Shintani descent checks for small classical groups."""

__version__ = "0.1.0"
