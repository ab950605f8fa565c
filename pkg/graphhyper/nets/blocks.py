"""Functional transformer pieces shared by the target families."""
from typing import Mapping

import torch
import torch.nn.functional as F

from graphhyper.errors import InitializationError


def lookup(params: Mapping[str, torch.Tensor], name: str) -> torch.Tensor:
    """Fetch a tensor or fail naming it."""
    try:
        return params[name]
    except KeyError:
        raise InitializationError(f"Missing tensor '{name}'", tensor=name) from None


def self_attention(x: torch.Tensor, qkv_w: torch.Tensor, qkv_b: torch.Tensor, out_w: torch.Tensor,
                   out_b: torch.Tensor, num_heads: int, causal: bool) -> torch.Tensor:
    """Fused-qkv multi-head attention over (B, T, D)."""
    b, t, d = x.shape
    qkv = F.linear(x, qkv_w, qkv_b).view(b, t, 3, num_heads, d // num_heads).permute(2, 0, 3, 1, 4)
    q, k, v = qkv[0], qkv[1], qkv[2]
    y = F.scaled_dot_product_attention(q, k, v, is_causal=causal)
    return F.linear(y.transpose(1, 2).reshape(b, t, d), out_w, out_b)


def transformer_block(x: torch.Tensor, params: Mapping[str, torch.Tensor], prefix: str, names: Mapping[str, str],
                      num_heads: int, causal: bool, eps: float) -> torch.Tensor:
    """Pre-norm block keyed by the graph builder's tensor names."""
    d = x.shape[-1]

    def p(key: str) -> torch.Tensor:
        return lookup(params, f"{prefix}.{key}")

    h = F.layer_norm(x, (d,), p(f"{names['ln_1']}.weight"), p(f"{names['ln_1']}.bias"), eps)
    x = x + self_attention(h, p(names["qkv_w"]), p(names["qkv_b"]),
                           p(f"{names['out']}.weight"), p(f"{names['out']}.bias"), num_heads, causal)
    h = F.layer_norm(x, (d,), p(f"{names['ln_2']}.weight"), p(f"{names['ln_2']}.bias"), eps)
    h = F.gelu(F.linear(h, p(f"{names['fc1']}.weight"), p(f"{names['fc1']}.bias")))
    return x + F.linear(h, p(f"{names['fc2']}.weight"), p(f"{names['fc2']}.bias"))
