"""Structure-based demarcation of protein domain linkers."""

__version__ = "0.1.0"
