"""Executable NP-hardness reductions for multiway cut on planar subcubic graphs."""

__version__ = "0.1.0"
