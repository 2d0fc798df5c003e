"""Desk-scale noisy-circuit simulation and symmetry-verification mitigation."""

__version__ = "0.1.0"
