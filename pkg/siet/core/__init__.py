"""Core functionality modules."""
