"""Rejection sampling hard instances, reductions and exact distance oracles."""

__version__ = "0.1.0"
