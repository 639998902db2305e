"""Exact minimal-resultant dynamics on the Berkovich projective line."""

__version__ = "0.1.0"
