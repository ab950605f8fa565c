"""Node embedding and graph encoder."""

from .features import NodeFeatureMatrix, PreparedGraph, prepare_graph, prepare_graph_cached, embed_nodes
from .graphormer import EncoderConfig, GraphormerLayer, GraphormerEncoder, encoder_param_count, graphormer_forward

__all__ = [
    'NodeFeatureMatrix',
    'PreparedGraph',
    'prepare_graph',
    'prepare_graph_cached',
    'embed_nodes',
    'EncoderConfig',
    'GraphormerLayer',
    'GraphormerEncoder',
    'encoder_param_count',
    'graphormer_forward'
]
