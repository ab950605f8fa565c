"""Computational graph of a target network."""
from dataclasses import dataclass, field
from math import prod
from typing import Dict, List, Optional, Tuple

import networkx as nx

from graphhyper.archspace.specs import ArchSpec
from graphhyper.errors import GraphBuildError
from graphhyper.graphir.optypes import STRUCTURAL_OPS, OpType

Shape4 = Tuple[int, int, int, int]


@dataclass(frozen=True)
class GraphNode:
    """
    One operation in the graph.

    Learnable nodes carry a tensor name, a target shape ``(c_out, c_in, h, w)``
    and the tensor's natural shape in the target network. Structural nodes
    carry none of these.
    """
    id: int
    op: OpType
    shape: Optional[Shape4] = None
    name: Optional[str] = None
    param_shape: Optional[Tuple[int, ...]] = None

    @property
    def learnable(self) -> bool:
        return self.name is not None

    @property
    def numel(self) -> int:
        """Scalar count of the node's tensor (0 for structural nodes)."""
        return prod(self.shape) if self.shape else 0

    @property
    def folded(self) -> Tuple[int, int]:
        """Folded matrix dims ``(c_out * h, c_in * w)``."""
        if self.shape is None:
            raise GraphBuildError(f"Structural node {self.id} has no tensor")
        c_out, c_in, h, w = self.shape
        return c_out * h, c_in * w

    @property
    def fan_in(self) -> int:
        """Inputs feeding one output unit of the node's tensor."""
        if self.shape is None:
            raise GraphBuildError(f"Structural node {self.id} has no tensor")
        _, c_in, h, w = self.shape
        return c_in * h * w

    @property
    def n_dim(self) -> int:
        """Realization mode: 1 for vectors, 4 for spatial kernels, 2 otherwise."""
        if self.shape is None:
            raise GraphBuildError(f"Structural node {self.id} has no tensor")
        _, c_in, h, w = self.shape
        if c_in == h == w == 1:
            return 1
        return 4 if h * w > 1 else 2


@dataclass(frozen=True)
class CompGraph:
    """
    Immutable DAG of operation nodes, edges following forward dataflow.

    ``non_predicted`` lists tensor names of the target network that no node
    owns (tied weights and buffers); they keep their framework defaults.
    """
    nodes: Tuple[GraphNode, ...]
    edges: Tuple[Tuple[int, int], ...]
    arch: Optional[ArchSpec] = None
    non_predicted: Tuple[str, ...] = ()
    id: str = ""
    _index: Dict[int, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        names = set()
        for position, node in enumerate(self.nodes):
            if node.id in index:
                raise GraphBuildError(f"Duplicate node id {node.id}")
            index[node.id] = position
            if node.learnable:
                if node.shape is None or len(node.shape) != 4 or any(d <= 0 for d in node.shape):
                    raise GraphBuildError(f"Node '{node.name}' has invalid target shape {node.shape}")
                if node.op in STRUCTURAL_OPS:
                    raise GraphBuildError(f"Structural op {node.op.value} cannot own tensor '{node.name}'")
                if node.name in names:
                    raise GraphBuildError(f"Tensor '{node.name}' is owned by more than one node")
                names.add(node.name)
        for src, dst in self.edges:
            if src not in index or dst not in index:
                raise GraphBuildError(f"Edge ({src}, {dst}) references an unknown node")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.nodes)

    def position(self, node_id: int) -> int:
        """Row of ``node_id`` in node order."""
        return self._index[node_id]

    @property
    def learnable_nodes(self) -> List[GraphNode]:
        return [node for node in self.nodes if node.learnable]

    @property
    def tensor_names(self) -> List[str]:
        return [node.name for node in self.nodes if node.learnable]

    def learnable_param_count(self) -> int:
        """Scalars owned by nodes."""
        return sum(node.numel for node in self.nodes)

    def to_networkx(self) -> nx.DiGraph:
        """Directed networkx view keyed by node id."""
        g = nx.DiGraph()
        for node in self.nodes:
            g.add_node(node.id, op=node.op.value, name=node.name)
        g.add_edges_from(self.edges)
        return g

    def topological_order(self) -> List[int]:
        """
        Node ids in a dataflow-respecting order.

        Raises:
            GraphBuildError: If the graph has a cycle
        """
        try:
            return list(nx.topological_sort(self.to_networkx()))
        except nx.NetworkXUnfeasible as e:
            raise GraphBuildError(f"Graph '{self.id}' is not acyclic") from e


def graph_summary(graph: CompGraph) -> Dict[str, int]:
    """Node, edge and learnable counts for logging."""
    learnable = graph.learnable_nodes
    return {
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
        "learnable_nodes": len(learnable),
        "learnable_params": sum(node.numel for node in learnable),
        "non_predicted": len(graph.non_predicted),
    }
