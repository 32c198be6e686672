"""Exact combinatorics of genus-zero symplectic field theory."""

__version__ = "0.1.0"
