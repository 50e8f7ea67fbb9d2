"""Symbolic workbench for variational reduction and Lax-type integrable hierarchies."""

__version__ = "0.1.0"
