"""Multi-round Fiat-Shamir in the quantum random oracle model: protocols, transforms and bound checks."""

__version__ = "0.1.0"
