"""Exact rational models for diagrams over the orbit categories of C_p and C_pq."""

__version__ = "0.1.0"
