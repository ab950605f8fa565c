"""Functional GPT-2-style language model."""
from typing import Mapping

import torch
import torch.nn.functional as F

from graphhyper.archspace.specs import GPTSpec
from graphhyper.errors import ContractViolation
from graphhyper.graphir.builder import GPT_BLOCK_NAMES
from graphhyper.nets.blocks import lookup, transformer_block

LN_EPS = 1e-5


def gpt_forward(params: Mapping[str, torch.Tensor], tokens: torch.Tensor, spec: GPTSpec) -> torch.Tensor:
    """
    Next-token logits for a batch of token sequences.

    Args:
        params: Tensors named as in the GPT graph
        tokens: (B, T) integer ids, T <= ``spec.context_length``
        spec: Architecture

    Returns:
        Logits (B, T, vocab_size)
    """
    t = tokens.shape[1]
    if t > spec.context_length:
        raise ContractViolation(f"Sequence length {t} exceeds context length {spec.context_length}")
    wte = lookup(params, "transformer.wte.weight")
    x = F.embedding(tokens, wte) + lookup(params, "transformer.wpe.weight")[:t]
    for i in range(spec.num_layers):
        x = transformer_block(x, params, f"transformer.h.{i}", GPT_BLOCK_NAMES,
                              spec.num_heads, causal=True, eps=LN_EPS)
    d = spec.embed_dim
    x = F.layer_norm(x, (d,), lookup(params, "transformer.ln_f.weight"), lookup(params, "transformer.ln_f.bias"),
                     LN_EPS)
    head = wte if spec.tie_word_embeddings else lookup(params, "lm_head.weight")
    return F.linear(x, head)
