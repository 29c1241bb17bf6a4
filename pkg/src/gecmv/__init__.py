"""Generalized extended CMV matrices, their transfer cocycles and reflection-based delocalization checks."""

__version__ = "0.1.0"
