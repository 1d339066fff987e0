"""Artificial chemistries and the analysis tools for studying organization in them."""

__version__ = "0.1.0"
