"""Exact majorization toolkit: rearrangements, criteria, doubly stochastic transfers."""

__version__ = "0.1.0"
