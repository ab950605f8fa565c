"""Graphormer-style encoder with shortest-path attention bias."""
import logging
import math
from dataclasses import dataclass
from typing import Union

import torch
import torch.nn as nn
import torch.nn.functional as F

from graphhyper.encoder.features import NodeFeatureMatrix, PreparedGraph, prepare_graph
from graphhyper.errors import ContractViolation, NumericError
from graphhyper.graphir.graph import CompGraph

logger = logging.getLogger("graphhyper.encoder")


@dataclass(frozen=True)
class EncoderConfig:
    """
    Encoder shape.

    Attributes:
        d: Feature width
        num_layers: Graphormer layer count (0 makes the encoder an identity)
        num_heads: Attention heads
        max_distance: Hop-distance clip for the attention bias
        max_degree: Degree clip for the centrality embedding
    """
    d: int
    num_layers: int
    num_heads: int
    max_distance: int = 8
    max_degree: int = 32

    def validate(self) -> "EncoderConfig":
        if self.d < 1 or self.num_heads < 1:
            raise ContractViolation(f"Encoder width and heads must be positive (d={self.d}, H={self.num_heads})")
        if self.d % self.num_heads != 0:
            raise ContractViolation(f"Encoder width {self.d} is not divisible by {self.num_heads} heads")
        if self.num_layers < 0:
            raise ContractViolation(f"Encoder layer count must be non-negative, got {self.num_layers}")
        return self

    @property
    def distance_buckets(self) -> int:
        """Bias rows: distances 0..max_distance plus one for unreachable pairs."""
        return self.max_distance + 2


class GraphormerLayer(nn.Module):
    """Post-norm layer: biased self-attention, residual, LN, FFN, residual, LN."""

    def __init__(self, d: int, num_heads: int, distance_buckets: int):
        super().__init__()
        self.num_heads = num_heads
        self.head_dim = d // num_heads
        self.qkv = nn.Linear(d, 3 * d)
        self.out_proj = nn.Linear(d, d)
        self.distance_bias = nn.Embedding(distance_buckets, num_heads)
        self.attn_norm = nn.LayerNorm(d)
        self.fc1 = nn.Linear(d, 4 * d)
        self.fc2 = nn.Linear(4 * d, d)
        self.ffn_norm = nn.LayerNorm(d)
        nn.init.normal_(self.distance_bias.weight, std=0.02)

    def forward(self, x: torch.Tensor, distance: torch.Tensor) -> torch.Tensor:
        n = x.shape[0]
        q, k, v = self.qkv(x).view(n, 3, self.num_heads, self.head_dim).permute(1, 2, 0, 3)
        scores = q @ k.transpose(-1, -2) / math.sqrt(self.head_dim)
        scores = scores + self.distance_bias(distance).permute(2, 0, 1)
        attn = torch.softmax(scores, dim=-1) @ v                     # (H, N, head_dim)
        attn = attn.transpose(0, 1).reshape(n, -1)
        x = self.attn_norm(x + self.out_proj(attn))
        return self.ffn_norm(x + self.fc2(F.relu(self.fc1(x))))


class GraphormerEncoder(nn.Module):
    """Stack of Graphormer layers plus a degree (centrality) embedding."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config.validate()
        self.layers = nn.ModuleList([
            GraphormerLayer(config.d, config.num_heads, config.distance_buckets)
            for _ in range(config.num_layers)
        ])
        self.degree_embedding = nn.Embedding(config.max_degree + 1, config.d) if config.num_layers else None
        if self.degree_embedding is not None:
            nn.init.normal_(self.degree_embedding.weight, std=0.02)

    def forward(self, x: torch.Tensor, graph: PreparedGraph) -> torch.Tensor:
        if not self.layers:
            return x
        distance = graph.distance.to(x.device)
        x = x + self.degree_embedding(graph.degree.to(x.device))
        for i, layer in enumerate(self.layers):
            x = layer(x, distance)
            if not torch.isfinite(x).all():
                raise NumericError("Non-finite activations", where=f"encoder layer {i}, graph '{graph.graph_id}'")
        return x


def encoder_param_count(config: EncoderConfig) -> int:
    """Closed-form scalar count of ``GraphormerEncoder(config)``."""
    d, h = config.d, config.num_heads
    if config.num_layers == 0:
        return 0
    per_layer = 12 * d * d + 13 * d + config.distance_buckets * h
    return config.num_layers * per_layer + (config.max_degree + 1) * d


def graphormer_forward(features: NodeFeatureMatrix, graph: Union[CompGraph, PreparedGraph],
                       encoder: GraphormerEncoder) -> NodeFeatureMatrix:
    """
    Run the encoder over node features.

    Args:
        features: Embedded nodes of ``graph``
        graph: Graph or its prepared form
        encoder: Encoder weights

    Returns:
        Features after ``num_layers`` layers (unchanged when there are none)

    Raises:
        ContractViolation: If widths or node counts disagree
        NumericError: If activations become non-finite, naming the layer
    """
    cfg = encoder.config
    if features.width != cfg.d:
        raise ContractViolation(f"Feature width {features.width} does not match encoder width {cfg.d}")
    if isinstance(graph, CompGraph):
        graph = prepare_graph(graph, cfg.max_distance, cfg.max_degree)
    if graph.num_nodes != len(features):
        raise ContractViolation(f"Graph has {graph.num_nodes} nodes but features have {len(features)} rows")
    if cfg.num_layers == 0:
        return features
    return NodeFeatureMatrix(values=encoder(features.values, graph), layer_index=cfg.num_layers)
