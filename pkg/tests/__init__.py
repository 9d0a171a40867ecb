"""Test suite for binsleuth."""
