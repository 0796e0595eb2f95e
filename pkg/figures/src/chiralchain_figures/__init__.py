"""Figure rendering for chiralchain output directories."""

__version__ = "0.1.0"
