"""Exact divisor calculus for moduli of cubic surfaces via 7-pointed rational curves."""

__version__ = "0.1.0"
