"""Certificates and searches for zero-avoiding permutations over finite abelian groups."""

__version__ = "0.1.0"
