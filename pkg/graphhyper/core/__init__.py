"""Core CLI modules."""
