"""Invariants of closed space curves with asymptotic-type framings."""

__version__ = "0.1.0"
