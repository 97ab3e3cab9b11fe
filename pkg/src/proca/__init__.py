"""Constrained Cauchy evolution of the Proca field in dielectric media."""

__version__ = "0.1.0"
