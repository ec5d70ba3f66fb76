"""Quantum Fisher information geometry at desk scale."""

__version__ = "0.1.0"
