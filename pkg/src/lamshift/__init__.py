"""A workbench for the call-by-value lambda calculus with shift and reset."""

__version__ = "0.1.0"
