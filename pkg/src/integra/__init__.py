"""Exact characteristic polynomials and certified integral trees of odd diameter."""
__version__ = "0.1.0"
