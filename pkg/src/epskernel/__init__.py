"""Logic kernel for quantifiers and Hilbert choice operators."""

__version__ = "0.1.0"
