"""Functional ViT classifier."""
from typing import Mapping

import torch
import torch.nn.functional as F

from graphhyper.archspace.specs import ViTSpec
from graphhyper.graphir.builder import VIT_BLOCK_NAMES
from graphhyper.nets.blocks import lookup, transformer_block

LN_EPS = 1e-6


def vit_forward(params: Mapping[str, torch.Tensor], images: torch.Tensor, spec: ViTSpec) -> torch.Tensor:
    """
    Classify a batch of images.

    Args:
        params: Tensors named as in the ViT graph
        images: (B, C, H, W) with H = W = ``spec.image_size``
        spec: Architecture

    Returns:
        Logits (B, num_classes)
    """
    d = spec.hidden_dim
    x = F.conv2d(images, lookup(params, "conv_proj.weight"), lookup(params, "conv_proj.bias"),
                 stride=spec.patch_size)
    x = x.flatten(2).transpose(1, 2)
    cls = lookup(params, "class_token").reshape(1, 1, d).expand(x.shape[0], -1, -1)
    x = torch.cat([cls, x], dim=1) + lookup(params, "encoder.pos_embedding").reshape(1, -1, d)
    for i in range(spec.num_layers):
        x = transformer_block(x, params, f"encoder.layers.encoder_layer_{i}", VIT_BLOCK_NAMES,
                              spec.num_heads, causal=False, eps=LN_EPS)
    x = F.layer_norm(x[:, 0], (d,), lookup(params, "encoder.ln.weight"), lookup(params, "encoder.ln.bias"), LN_EPS)
    return F.linear(x, lookup(params, "heads.head.weight"), lookup(params, "heads.head.bias"))
