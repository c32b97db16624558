"""Exact germ, holonomy and monodromy computations for locally Lie groupoids given by PL data."""

__version__ = "0.1.0"
