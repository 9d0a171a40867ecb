"""Unit tests for individual binsleuth modules."""
