"""Graph hypernetwork model and its variant presets."""

from .variants import GHNConfig, VARIANTS, REFERENCE_TOTALS, LOWRANK, TILED, get_variant
from .network import GraphHyperNetwork, count_ghn_parameters

__all__ = [
    'GHNConfig',
    'VARIANTS',
    'REFERENCE_TOTALS',
    'LOWRANK',
    'TILED',
    'get_variant',
    'GraphHyperNetwork',
    'count_ghn_parameters'
]
