"""Hyperbolic mapping schemes: enumeration, symmetry, Blaschke models, dynamics and pictures."""

__version__ = "0.1.0"
