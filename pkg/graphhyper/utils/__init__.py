"""Utilities package for graphhyper."""
