"""Potential theory on compact sets, polynomial Julia dynamics, Klimek
distances, and arithmetic heights, with a reproducible experiment harness."""

__version__ = "0.1.0"
