"""Exact computations in ramified partition algebras and clock-model transfer matrices."""

__version__ = "0.1.0"
