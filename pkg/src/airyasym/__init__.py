"""Asymptotic expansions of Airy-type functions with exact rational coefficients."""

__version__ = "0.1.0"
