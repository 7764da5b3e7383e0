"""stlab: a desk-scale end-to-end speech translation laboratory."""

__version__ = "0.1.0"
