"""Parafermionic Fock-space tools for stochastic models with partial exclusion."""

__version__ = "0.1.0"
