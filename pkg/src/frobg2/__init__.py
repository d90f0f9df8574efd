"""Verification workbench for the genus-two free-energy decomposition
of semisimple Frobenius manifolds in canonical coordinates."""

__version__ = "0.1.0"
