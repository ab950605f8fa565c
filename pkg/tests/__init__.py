"""Tests package for graphhyper."""
