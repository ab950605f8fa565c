"""Dispatch over target families: shapes, forward passes, baseline inits."""
import math
from typing import Dict, Mapping, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from graphhyper.archspace.specs import ArchSpec, GPTSpec, LinearSpec, ViTSpec
from graphhyper.errors import InitializationError, SpecValidationError
from graphhyper.graphir.builder import build_graph
from graphhyper.graphir.graph import GraphNode
from graphhyper.graphir.optypes import OpType
from graphhyper.nets.blocks import lookup
from graphhyper.nets.gpt import gpt_forward
from graphhyper.nets.vit import vit_forward

# Standard deviation GPT-2 style models draw embeddings and projections from
GPT_INIT_STD = 0.02
POS_EMBEDDING_STD = 0.02


def parameter_shapes(spec: ArchSpec) -> Dict[str, Tuple[int, ...]]:
    """Natural shape of every learnable tensor, in graph order."""
    return {node.name: node.param_shape for node in build_graph(spec).learnable_nodes}


def check_parameters(params: Mapping[str, torch.Tensor], spec: ArchSpec) -> None:
    """
    Raises:
        InitializationError: Naming the first missing or mis-shaped tensor
    """
    for name, shape in parameter_shapes(spec).items():
        if name not in params:
            raise InitializationError(f"Missing tensor '{name}'", tensor=name)
        if tuple(params[name].shape) != tuple(shape):
            raise InitializationError(
                f"Tensor '{name}' has shape {tuple(params[name].shape)}, expected {tuple(shape)}", tensor=name
            )


def forward(params: Mapping[str, torch.Tensor], inputs: torch.Tensor, spec: ArchSpec) -> torch.Tensor:
    """Run the target network described by ``spec`` with ``params``."""
    if isinstance(spec, ViTSpec):
        return vit_forward(params, inputs, spec)
    if isinstance(spec, GPTSpec):
        return gpt_forward(params, inputs, spec)
    if isinstance(spec, LinearSpec):
        bias = lookup(params, "head.bias") if spec.bias else None
        return F.linear(inputs.flatten(1), lookup(params, "head.weight"), bias)
    raise SpecValidationError(f"Unsupported spec type: {type(spec).__name__}")


def task_loss(params: Mapping[str, torch.Tensor], batch: Tuple[torch.Tensor, ...], spec: ArchSpec) -> torch.Tensor:
    """
    Mean cross-entropy on a batch.

    Classification batches are ``(inputs, labels)``; language-model batches
    are ``(tokens,)`` and are scored on next-token prediction.
    """
    if isinstance(spec, GPTSpec):
        tokens = batch[0]
        logits = forward(params, tokens[:, :-1], spec)
        return F.cross_entropy(logits.reshape(-1, logits.shape[-1]), tokens[:, 1:].reshape(-1))
    inputs, labels = batch
    return F.cross_entropy(forward(params, inputs, spec), labels)


def _default_init(node: GraphNode, spec: ArchSpec) -> torch.Tensor:
    """Framework-default draw for one tensor (uses the global torch RNG)."""
    value = torch.empty(node.param_shape)
    if node.op == OpType.LAYER_NORM_SCALE:
        return nn.init.ones_(value)
    if node.op == OpType.LAYER_NORM_SHIFT:
        return nn.init.zeros_(value)
    if isinstance(spec, GPTSpec):
        if node.op == OpType.BIAS:
            return nn.init.zeros_(value)
        return nn.init.normal_(value, std=GPT_INIT_STD)
    if node.op == OpType.TOKEN_EMBEDDING:
        return nn.init.zeros_(value)
    if node.op == OpType.POSITIONAL_EMBEDDING:
        return nn.init.normal_(value, std=POS_EMBEDDING_STD)
    bound = 1.0 / math.sqrt(node.fan_in)
    if node.op == OpType.BIAS:
        return nn.init.uniform_(value, -bound, bound)
    return nn.init.kaiming_uniform_(value.view(node.shape), a=math.sqrt(5)).view(node.param_shape)


def random_init(spec: ArchSpec, seed: int = 0) -> Dict[str, torch.Tensor]:
    """
    Parameters as the framework's own modules would initialize them.

    ViT and linear layers use the default uniform fan-in draws, GPT models
    normal draws with std 0.02; layer norms start at identity.
    """
    graph = build_graph(spec)
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return {node.name: _default_init(node, spec) for node in graph.learnable_nodes}


def orth_init(spec: ArchSpec, seed: int = 0) -> Dict[str, torch.Tensor]:
    """Random init with every weight matrix replaced by a (semi-)orthogonal draw."""
    params = random_init(spec, seed)
    graph = build_graph(spec)
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed + 1)
        for node in graph.learnable_nodes:
            if node.n_dim == 1:
                continue
            folded = torch.empty(node.shape).view(node.shape[0], -1)
            params[node.name] = nn.init.orthogonal_(folded).view(node.param_shape)
    return params
