"""Exact graph-sum computation of X-valued double ramification cycles."""

__version__ = "0.1.0"
