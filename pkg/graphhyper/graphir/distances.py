"""Shortest-path hop distances between graph nodes."""
import networkx as nx
import numpy as np

from graphhyper.graphir.graph import CompGraph

# Marks pairs with no connecting path
UNREACHABLE = np.iinfo(np.int32).max


def shortest_path_distances(graph: CompGraph, undirected: bool = True) -> np.ndarray:
    """
    All-pairs hop distances, rows and columns in node order.

    Args:
        graph: Source graph
        undirected: Measure on the undirected closure (symmetric result);
            otherwise follow edge direction only

    Returns:
        ``|V| x |V|`` int64 matrix, ``UNREACHABLE`` where no path exists
    """
    g = graph.to_networkx()
    if undirected:
        g = g.to_undirected()
    n = len(graph.nodes)
    dist = np.full((n, n), UNREACHABLE, dtype=np.int64)
    for src, lengths in nx.all_pairs_shortest_path_length(g):
        row = graph.position(src)
        for dst, hops in lengths.items():
            dist[row, graph.position(dst)] = hops
    return dist


def bucket_distances(dist: np.ndarray, max_distance: int) -> np.ndarray:
    """
    Clip distances to ``max_distance``; unreachable pairs get ``max_distance + 1``.

    Returns:
        int64 matrix with values in ``[0, max_distance + 1]``
    """
    buckets = np.minimum(dist, max_distance)
    buckets[dist == UNREACHABLE] = max_distance + 1
    return buckets
