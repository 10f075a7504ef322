"""Frobenius invariants of K3 surfaces with non-symplectic automorphisms."""

__version__ = "0.1.0"
