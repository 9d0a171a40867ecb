"""Configuration and worker infrastructure for binsleuth."""
