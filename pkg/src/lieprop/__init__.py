"""Lieprop - propagators for SU(2) and SU(1,1) Hamiltonians from time-dependent invariants."""

__version__ = "0.1.0"
