"""Exact jet-level normal forms, torus actions and Darboux data for vector fields."""

__version__ = "0.1.0"
