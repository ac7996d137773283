"""Steady two-qubit entanglement near a slab out of thermal equilibrium."""

__version__ = "0.1.0"
