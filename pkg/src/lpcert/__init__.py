"""Certified real-rootedness and Laguerre-Polya membership tools."""

__version__ = "0.1.0"
