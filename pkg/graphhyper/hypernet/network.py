"""Graph hypernetwork: node embedding, encoder and decoder."""
import logging
from typing import Dict, Optional, Union

import torch
import torch.nn as nn

from graphhyper.decoder.lowrank import DecoderConfig, LowRankDecoder
from graphhyper.decoder.predict import PredictedParameterSet, predict_all, predict_all_tiled
from graphhyper.decoder.tiled import TiledDecoder
from graphhyper.encoder.features import (
    NodeFeatureMatrix, PreparedGraph, embed_nodes, prepare_graph_cached
)
from graphhyper.encoder.graphormer import EncoderConfig, GraphormerEncoder, graphormer_forward
from graphhyper.graphir.graph import CompGraph
from graphhyper.graphir.optypes import VOCAB_SIZE
from graphhyper.hypernet.variants import LOWRANK, GHNConfig

logger = logging.getLogger("graphhyper.hypernet")


class GraphHyperNetwork(nn.Module):
    """Predicts a target network's parameters from its computational graph."""

    def __init__(self, config: GHNConfig):
        super().__init__()
        self.config = config.validate()
        self.node_embedding = nn.Embedding(VOCAB_SIZE, config.d)
        self.encoder = GraphormerEncoder(self.encoder_config)
        if config.decoder == LOWRANK:
            self.decoder = LowRankDecoder(config.d, config.r, config.K)
        else:
            self.decoder = TiledDecoder(config.d, config.num_classes)

    @property
    def encoder_config(self) -> EncoderConfig:
        c = self.config
        return EncoderConfig(d=c.d, num_layers=c.num_layers, num_heads=c.num_heads,
                             max_distance=c.max_distance, max_degree=c.max_degree)

    @property
    def decoder_config(self) -> DecoderConfig:
        c = self.config
        return DecoderConfig(d=c.d, r=c.r, K=c.K, num_classes=c.num_classes, chunk_size=c.chunk_size)

    def prepare(self, graph: CompGraph) -> PreparedGraph:
        return prepare_graph_cached(graph, self.config.max_distance, self.config.max_degree)

    def encode(self, graph: Union[CompGraph, PreparedGraph]) -> NodeFeatureMatrix:
        """Node features after embedding and all encoder layers."""
        prepared = self.prepare(graph) if isinstance(graph, CompGraph) else graph
        features = embed_nodes(prepared, self.node_embedding)
        return graphormer_forward(features, prepared, self.encoder)

    def forward(self, graph: CompGraph, allow_fallback: Optional[bool] = None,
                fallback_seed: int = 0) -> PredictedParameterSet:
        """
        Predict every learnable tensor of ``graph``.

        Args:
            graph: Target graph
            allow_fallback: Overrides the config's fallback policy
            fallback_seed: Seed for fallback draws

        Returns:
            Predicted parameters; gradients flow back into this module
        """
        features = self.encode(graph)
        if isinstance(self.decoder, LowRankDecoder):
            allow = self.config.allow_fallback if allow_fallback is None else allow_fallback
            return predict_all(graph, features, self.decoder, self.decoder_config,
                               allow_fallback=allow, fallback_seed=fallback_seed)
        return predict_all_tiled(graph, features, self.decoder)

    def parameter_breakdown(self) -> Dict[str, int]:
        """Scalar counts per component and in total."""
        parts = {
            "embedding": sum(p.numel() for p in self.node_embedding.parameters()),
            "encoder": sum(p.numel() for p in self.encoder.parameters()),
            "decoder": sum(p.numel() for p in self.decoder.parameters()),
        }
        parts["total"] = sum(parts.values())
        return parts


def count_ghn_parameters(config: GHNConfig) -> Dict[str, int]:
    """
    Parameter breakdown of a hypernetwork built on the meta device.

    No memory is allocated, so the largest variants can be counted.
    """
    with torch.device("meta"):
        model = GraphHyperNetwork(config)
    return model.parameter_breakdown()
