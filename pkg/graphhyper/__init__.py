"""graphhyper - low-rank graph hypernetworks for transformer parameter prediction."""
__version__ = "0.1.0"
