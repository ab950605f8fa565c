"""Command modules for graphhyper."""
