"""Builds computational graphs from architecture specs."""
import logging
from dataclasses import replace
from typing import List, Optional, Tuple

from graphhyper.archspace.specs import ArchSpec, GPTSpec, LinearSpec, ViTSpec
from graphhyper.errors import GraphBuildError
from graphhyper.graphir.graph import CompGraph, GraphNode, graph_summary
from graphhyper.graphir.optypes import OpType

logger = logging.getLogger("graphhyper.graphir.builder")


class _GraphBuilder:
    """Appends nodes and edges in dataflow order."""

    def __init__(self):
        self.nodes: List[GraphNode] = []
        self.edges: List[Tuple[int, int]] = []

    def op(self, op: OpType, *inputs: int) -> int:
        """Add a structural node fed by ``inputs``."""
        node_id = len(self.nodes)
        self.nodes.append(GraphNode(id=node_id, op=op))
        self.edges.extend((src, node_id) for src in inputs)
        return node_id

    def tensor(self, op: OpType, name: str, param_shape: Tuple[int, ...], *inputs: int) -> int:
        """Add a learnable node; its target shape is derived from ``param_shape``."""
        node_id = len(self.nodes)
        self.nodes.append(GraphNode(id=node_id, op=op, shape=target_shape(param_shape),
                                    name=name, param_shape=tuple(param_shape)))
        self.edges.extend((src, node_id) for src in inputs)
        return node_id

    def linear(self, op: OpType, prefix: str, out_features: int, in_features: int,
               src: int, bias: bool = True) -> int:
        """Weight node followed by its bias node; returns the last node."""
        last = self.tensor(op, f"{prefix}.weight", (out_features, in_features), src)
        if bias:
            last = self.tensor(OpType.BIAS, f"{prefix}.bias", (out_features,), last)
        return last

    def layer_norm(self, prefix: str, dim: int, src: int) -> int:
        scale = self.tensor(OpType.LAYER_NORM_SCALE, f"{prefix}.weight", (dim,), src)
        return self.tensor(OpType.LAYER_NORM_SHIFT, f"{prefix}.bias", (dim,), scale)

    def build(self, arch: ArchSpec, non_predicted: Tuple[str, ...] = ()) -> CompGraph:
        return CompGraph(nodes=tuple(self.nodes), edges=tuple(self.edges),
                         arch=arch, non_predicted=non_predicted)


def target_shape(param_shape: Tuple[int, ...]) -> Tuple[int, int, int, int]:
    """
    Fold a tensor shape into ``(c_out, c_in, h, w)``.

    Vectors become ``(c, 1, 1, 1)``, matrices ``(out, in, 1, 1)`` and
    convolution kernels keep their four dims. Leading singleton dims (class
    token, position table) are dropped first.

    Raises:
        GraphBuildError: If the shape cannot be folded
    """
    dims = list(param_shape)
    while len(dims) > 1 and dims[0] == 1:
        dims.pop(0)
    if any(d <= 0 for d in dims):
        raise GraphBuildError(f"Non-positive dimension in shape {tuple(param_shape)}")
    if len(dims) == 1:
        return dims[0], 1, 1, 1
    if len(dims) == 2:
        return dims[0], dims[1], 1, 1
    if len(dims) == 4:
        return dims[0], dims[1], dims[2], dims[3]
    raise GraphBuildError(f"Cannot fold tensor of shape {tuple(param_shape)}")


def _transformer_block(b: _GraphBuilder, prev: int, prefix: str, names: dict, dim: int, mlp_dim: int) -> int:
    """Pre-norm block: LN, fused qkv attention, residual, LN, MLP, residual."""
    x = b.layer_norm(f"{prefix}.{names['ln_1']}", dim, prev)
    x = b.tensor(OpType.QKV_PROJECTION, f"{prefix}.{names['qkv_w']}", (3 * dim, dim), x)
    x = b.tensor(OpType.BIAS, f"{prefix}.{names['qkv_b']}", (3 * dim,), x)
    x = b.op(OpType.SOFTMAX, x)
    x = b.linear(OpType.ATTENTION_OUTPUT_PROJECTION, f"{prefix}.{names['out']}", dim, dim, x)
    res1 = b.op(OpType.RESIDUAL_ADD, x, prev)
    x = b.layer_norm(f"{prefix}.{names['ln_2']}", dim, res1)
    x = b.linear(OpType.MLP_FC1, f"{prefix}.{names['fc1']}", mlp_dim, dim, x)
    x = b.op(OpType.ACTIVATION, x)
    x = b.linear(OpType.MLP_FC2, f"{prefix}.{names['fc2']}", dim, mlp_dim, x)
    return b.op(OpType.RESIDUAL_ADD, x, res1)


VIT_BLOCK_NAMES = {
    "ln_1": "ln_1",
    "qkv_w": "self_attention.in_proj_weight",
    "qkv_b": "self_attention.in_proj_bias",
    "out": "self_attention.out_proj",
    "ln_2": "ln_2",
    "fc1": "mlp.0",
    "fc2": "mlp.3",
}

GPT_BLOCK_NAMES = {
    "ln_1": "ln_1",
    "qkv_w": "attn.c_attn.weight",
    "qkv_b": "attn.c_attn.bias",
    "out": "attn.c_proj",
    "ln_2": "ln_2",
    "fc1": "mlp.c_fc",
    "fc2": "mlp.c_proj",
}

# Structural plus learnable nodes contributed by one transformer block
BLOCK_NODE_COUNT = 16
BLOCK_LEARNABLE_COUNT = 12


def build_vit_graph(spec: ViTSpec) -> CompGraph:
    d = spec.hidden_dim
    b = _GraphBuilder()
    x = b.op(OpType.INPUT)
    x = b.tensor(OpType.PATCH_PROJECTION, "conv_proj.weight",
                 (d, spec.in_channels, spec.patch_size, spec.patch_size), x)
    x = b.tensor(OpType.BIAS, "conv_proj.bias", (d,), x)
    x = b.tensor(OpType.TOKEN_EMBEDDING, "class_token", (1, 1, d), x)
    x = b.tensor(OpType.POSITIONAL_EMBEDDING, "encoder.pos_embedding", (1, spec.seq_length, d), x)
    for i in range(spec.num_layers):
        x = _transformer_block(b, x, f"encoder.layers.encoder_layer_{i}", VIT_BLOCK_NAMES, d, spec.mlp_dim)
    x = b.layer_norm("encoder.ln", d, x)
    x = b.linear(OpType.CLASSIFICATION_HEAD, "heads.head", spec.num_classes, d, x)
    b.op(OpType.OUTPUT, x)
    return b.build(spec)


def build_gpt_graph(spec: GPTSpec) -> CompGraph:
    d = spec.embed_dim
    b = _GraphBuilder()
    inputs = b.op(OpType.INPUT)
    wte = b.tensor(OpType.TOKEN_EMBEDDING, "transformer.wte.weight", (spec.vocab_size, d), inputs)
    wpe = b.tensor(OpType.POSITIONAL_EMBEDDING, "transformer.wpe.weight", (spec.context_length, d), inputs)
    x = b.op(OpType.RESIDUAL_ADD, wte, wpe)
    for i in range(spec.num_layers):
        x = _transformer_block(b, x, f"transformer.h.{i}", GPT_BLOCK_NAMES, d, spec.mlp_dim)
    x = b.layer_norm("transformer.ln_f", d, x)
    non_predicted = ["causal_mask"]
    if spec.tie_word_embeddings:
        non_predicted.append("lm_head.weight")
    else:
        x = b.tensor(OpType.LM_HEAD, "lm_head.weight", (spec.vocab_size, d), x)
    b.op(OpType.OUTPUT, x)
    return b.build(spec, tuple(non_predicted))


def build_linear_graph(spec: LinearSpec) -> CompGraph:
    b = _GraphBuilder()
    x = b.op(OpType.INPUT)
    x = b.linear(OpType.CLASSIFICATION_HEAD, "head", spec.out_features, spec.in_features, x, bias=spec.bias)
    b.op(OpType.OUTPUT, x)
    return b.build(spec)


def build_graph(spec: ArchSpec, graph_id: Optional[str] = None) -> CompGraph:
    """
    Build the computational graph of the network ``spec`` instantiates.

    Args:
        spec: Architecture spec
        graph_id: Optional identifier stored on the graph

    Returns:
        Acyclic graph with one node per learnable tensor plus structural nodes

    Raises:
        GraphBuildError: If the spec family is unsupported
        SpecValidationError: If the spec is invalid
    """
    spec.validate()
    if isinstance(spec, ViTSpec):
        graph = build_vit_graph(spec)
    elif isinstance(spec, GPTSpec):
        graph = build_gpt_graph(spec)
    elif isinstance(spec, LinearSpec):
        graph = build_linear_graph(spec)
    else:
        raise GraphBuildError(f"Unsupported architecture op set: {type(spec).__name__}")

    if graph_id is not None:
        graph = replace(graph, id=graph_id)
    graph.topological_order()
    logger.debug(f"Built graph {graph.id or spec.kind}: {graph_summary(graph)}")
    return graph
