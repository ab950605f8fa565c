"""Computational graphs of target networks."""

from .optypes import OpType, VOCAB_VERSION, VOCAB_SIZE
from .graph import CompGraph, GraphNode, graph_summary
from .builder import build_graph, target_shape
from .distances import UNREACHABLE, shortest_path_distances, bucket_distances
from .codec import serialize_graph, deserialize_graph, read_graphs, write_graphs

__all__ = [
    'OpType',
    'VOCAB_VERSION',
    'VOCAB_SIZE',
    'CompGraph',
    'GraphNode',
    'graph_summary',
    'build_graph',
    'target_shape',
    'UNREACHABLE',
    'shortest_path_distances',
    'bucket_distances',
    'serialize_graph',
    'deserialize_graph',
    'read_graphs',
    'write_graphs'
]
