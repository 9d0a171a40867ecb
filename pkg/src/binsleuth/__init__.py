"""binsleuth: architecture and endianness classification of compiled object code."""

__version__ = "0.1.0"
