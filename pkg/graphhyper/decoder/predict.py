"""Realizing a full parameter set from node features."""
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import torch

from graphhyper.archspace.specs import ArchSpec
from graphhyper.decoder.lowrank import DecoderConfig, LowRankDecoder, realize_matrix
from graphhyper.decoder.tiled import TiledDecoder, tiled_decode
from graphhyper.encoder.features import NodeFeatureMatrix
from graphhyper.errors import ContractViolation, OversizeError
from graphhyper.graphir.graph import CompGraph, GraphNode
from graphhyper.graphir.optypes import OpType

logger = logging.getLogger("graphhyper.decoder.predict")

PREDICTED = "predicted"
FALLBACK = "fallback"


@dataclass
class PredictedParameterSet:
    """
    Named tensors for one target network.

    Attributes:
        arch: Spec the tensors belong to
        tensors: Tensor name to value, in the network's natural shapes
        sources: Tensor name to ``predicted`` or ``fallback``
        non_predicted: Names left at framework defaults (tied weights, buffers)
    """
    arch: Optional[ArchSpec]
    tensors: Dict[str, torch.Tensor]
    sources: Dict[str, str] = field(default_factory=dict)
    non_predicted: Tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.tensors)

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __getitem__(self, name: str) -> torch.Tensor:
        return self.tensors[name]

    @property
    def fallback_report(self) -> List[str]:
        """Names of tensors that were randomly initialized instead of predicted."""
        return [name for name, source in self.sources.items() if source == FALLBACK]

    def predicted_tensors(self) -> List[torch.Tensor]:
        return [self.tensors[name] for name, source in self.sources.items() if source == PREDICTED]

    def num_parameters(self) -> int:
        return sum(t.numel() for t in self.tensors.values())

    def detach(self) -> "PredictedParameterSet":
        """Copy with gradient-free tensors."""
        return PredictedParameterSet(
            arch=self.arch,
            tensors={name: t.detach().clone() for name, t in self.tensors.items()},
            sources=dict(self.sources),
            non_predicted=self.non_predicted,
        )

    def to_numpy(self) -> Dict[str, np.ndarray]:
        return {name: t.detach().cpu().numpy() for name, t in self.tensors.items()}


def fallback_tensor(node: GraphNode, seed: int = 0, dtype: torch.dtype = torch.float32,
                    device: Optional[torch.device] = None) -> torch.Tensor:
    """
    Variance-scaled normal draw for a tensor the decoder cannot cover.

    The generator is seeded from ``seed`` and the tensor name, so the same
    tensor gets the same values in every run.
    """
    digest = hashlib.sha256(f"{seed}:{node.name}".encode("utf-8")).digest()
    generator = torch.Generator().manual_seed(int.from_bytes(digest[:8], "little") & 0x7FFFFFFFFFFFFFFF)
    values = torch.randn(node.param_shape, generator=generator, dtype=dtype) / node.fan_in ** 0.5
    return values.to(device) if device is not None else values


def post_scale(node: GraphNode, value: torch.Tensor, n_dim: int) -> torch.Tensor:
    """Scale weights by ``1/sqrt(fan_in)``; centre layer-norm scales at one."""
    if n_dim == 1:
        return 1.0 + value if node.op == OpType.LAYER_NORM_SCALE else value
    return value * node.fan_in ** -0.5


def _check_fits(node: GraphNode, K: int) -> Optional[int]:
    rows, cols = node.folded
    folded = max(rows, cols)
    return folded if folded > K else None


def predict_all(graph: CompGraph, features: NodeFeatureMatrix, weights: LowRankDecoder, cfg: DecoderConfig,
                allow_fallback: bool = True, fallback_seed: int = 0) -> PredictedParameterSet:
    """
    Realize every learnable tensor of ``graph``.

    Nodes are decoded in chunks of ``cfg.chunk_size``; for each node only the
    factor prefixes its target shape reads are computed.

    Args:
        graph: Target graph
        features: Encoder output for ``graph``
        weights: Decoder weights
        cfg: Decoder configuration
        allow_fallback: Randomly initialize oversize tensors instead of failing
        fallback_seed: Seed for fallback draws

    Returns:
        Parameter set in the network's natural tensor shapes

    Raises:
        OversizeError: If a tensor exceeds K and fallback is disabled
        ContractViolation: If features do not match the graph
    """
    if len(features) != len(graph.nodes):
        raise ContractViolation(f"Graph has {len(graph.nodes)} nodes but features have {len(features)} rows")
    tensors: Dict[str, torch.Tensor] = {}
    sources: Dict[str, str] = {}
    values = features.values
    learnable = [(graph.position(node.id), node) for node in graph.learnable_nodes]

    for start in range(0, len(learnable), cfg.chunk_size):
        chunk = learnable[start:start + cfg.chunk_size]
        rows_index = torch.tensor([pos for pos, _ in chunk], dtype=torch.long, device=values.device)
        hidden = weights.hidden(values[rows_index])
        for (_, node), node_hidden in zip(chunk, hidden):
            folded = _check_fits(node, cfg.K)
            if folded is not None:
                if not allow_fallback:
                    raise OversizeError(node.name, folded, cfg.K)
                tensors[node.name] = fallback_tensor(node, fallback_seed, values.dtype, values.device)
                sources[node.name] = FALLBACK
                continue
            rows, cols = node.folded
            A, B = weights.factor_prefix(node_hidden, rows, cols)
            n_dim = node.n_dim
            value = realize_matrix(A, B, node.shape, n_dim)
            tensors[node.name] = post_scale(node, value, n_dim).reshape(node.param_shape)
            sources[node.name] = PREDICTED

    result = PredictedParameterSet(graph.arch, tensors, sources, graph.non_predicted)
    if result.fallback_report:
        logger.warning(f"Graph '{graph.id}': {len(result.fallback_report)} tensors exceed K={cfg.K} "
                       f"and use fallback init: {', '.join(result.fallback_report)}")
    return result


def predict_all_tiled(graph: CompGraph, features: NodeFeatureMatrix, weights: TiledDecoder) -> PredictedParameterSet:
    """
    Realize every learnable tensor with the tiled decoder.

    Raises:
        ContractViolation: If a spatial kernel exceeds the block face
    """
    tensors: Dict[str, torch.Tensor] = {}
    for node in graph.learnable_nodes:
        row = features.values[graph.position(node.id)]
        head = node.op == OpType.CLASSIFICATION_HEAD
        value = tiled_decode(row, weights, node.shape, head=head)
        n_dim = node.n_dim
        tensors[node.name] = post_scale(node, value, n_dim).reshape(node.param_shape)
    sources = {name: PREDICTED for name in tensors}
    return PredictedParameterSet(graph.arch, tensors, sources, graph.non_predicted)
