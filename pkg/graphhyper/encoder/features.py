"""Graph-to-tensor conversion and node embedding."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
import torch
import torch.nn as nn

from graphhyper.errors import ContractViolation, NumericError, VocabularyError
from graphhyper.graphir.distances import bucket_distances, shortest_path_distances
from graphhyper.graphir.graph import CompGraph
from graphhyper.graphir.optypes import OP_INDEX, VOCAB_SIZE


@dataclass
class NodeFeatureMatrix:
    """Per-node features ``values`` (|V| x d) after ``layer_index`` encoder stages."""
    values: torch.Tensor
    layer_index: int

    @property
    def width(self) -> int:
        return int(self.values.shape[-1])

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def check_finite(self, where: str) -> "NodeFeatureMatrix":
        """
        Raises:
            NumericError: If any entry is NaN or infinite
        """
        if not torch.isfinite(self.values).all():
            raise NumericError("Non-finite node features", where=where)
        return self


@dataclass
class PreparedGraph:
    """Tensor view of a graph consumed by the encoder."""
    op_index: torch.Tensor        # (N,) long
    degree: torch.Tensor          # (N,) long, clipped in+out degree
    distance: torch.Tensor        # (N, N) long, bucketed hop distance
    graph_id: str = ""

    @property
    def num_nodes(self) -> int:
        return int(self.op_index.shape[0])

    def permute(self, perm: torch.Tensor) -> "PreparedGraph":
        """Reorder nodes; ``perm[i]`` is the old index of new node ``i``."""
        return PreparedGraph(
            op_index=self.op_index[perm],
            degree=self.degree[perm],
            distance=self.distance[perm][:, perm],
            graph_id=self.graph_id,
        )


def prepare_graph(graph: CompGraph, max_distance: int = 8, max_degree: int = 32) -> PreparedGraph:
    """
    Convert a graph into encoder inputs.

    Args:
        graph: Source graph
        max_distance: Distance clip; unreachable pairs map to ``max_distance + 1``
        max_degree: Degree clip

    Returns:
        Prepared tensors in node order
    """
    if max_distance < 0 or max_degree < 0:
        raise ContractViolation("max_distance and max_degree must be non-negative")
    op_index = np.array([OP_INDEX[node.op] for node in graph.nodes], dtype=np.int64)
    degree = np.zeros(len(graph.nodes), dtype=np.int64)
    for src, dst in graph.edges:
        degree[graph.position(src)] += 1
        degree[graph.position(dst)] += 1
    distance = bucket_distances(shortest_path_distances(graph), max_distance)
    return PreparedGraph(
        op_index=torch.from_numpy(op_index),
        degree=torch.from_numpy(np.minimum(degree, max_degree)),
        distance=torch.from_numpy(distance),
        graph_id=graph.id,
    )


@lru_cache(maxsize=4096)
def prepare_graph_cached(graph: CompGraph, max_distance: int = 8, max_degree: int = 32) -> PreparedGraph:
    """``prepare_graph`` memoized on the (immutable) graph."""
    return prepare_graph(graph, max_distance, max_degree)


def embed_nodes(graph: Union[CompGraph, PreparedGraph], table: Union[torch.Tensor, nn.Embedding],
                device: Optional[torch.device] = None) -> NodeFeatureMatrix:
    """
    Look up each node's op row in the embedding table.

    Args:
        graph: Graph or its prepared form
        table: ``|OpType| x d`` matrix or embedding module

    Returns:
        Features with ``layer_index = 1``

    Raises:
        VocabularyError: If an op index falls outside the table
    """
    weight = table.weight if isinstance(table, nn.Embedding) else table
    if isinstance(graph, CompGraph):
        index = torch.tensor([OP_INDEX[node.op] for node in graph.nodes], dtype=torch.long)
    else:
        index = graph.op_index
    index = index.to(device or weight.device)
    if index.numel() and (int(index.max()) >= weight.shape[0] or int(index.min()) < 0):
        raise VocabularyError(
            f"Op index {int(index.max())} outside embedding table of {weight.shape[0]} rows (vocabulary {VOCAB_SIZE})"
        )
    return NodeFeatureMatrix(values=weight[index], layer_index=1)
