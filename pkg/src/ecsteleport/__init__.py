"""Entangled-coherent-state teleportation simulator on truncated Fock spaces."""

__version__ = "0.1.0"
