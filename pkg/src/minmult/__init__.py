"""Exact computations with artinian local algebras, their modules and resolutions."""

__version__ = "0.1.0"
