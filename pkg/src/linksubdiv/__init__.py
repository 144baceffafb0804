"""Finite subdivision rules for prime alternating link complements."""

__version__ = "0.1.0"
