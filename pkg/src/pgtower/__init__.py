"""Finite p-group towers: constructions, stage audits and F_p cohomology."""
__version__ = "0.1.0"
