"""Closed-form learnable-parameter counts for target networks."""
from graphhyper.archspace.specs import ArchSpec, GPTSpec, LinearSpec, ViTSpec
from graphhyper.errors import SpecValidationError


def linear_param_count(in_features: int, out_features: int, bias: bool = True) -> int:
    """Scalars in a dense layer."""
    return in_features * out_features + (out_features if bias else 0)


def layer_norm_param_count(dim: int) -> int:
    """Scale and shift of a layer norm."""
    return 2 * dim


def transformer_block_param_count(dim: int, mlp_dim: int) -> int:
    """
    Scalars in one pre-norm transformer block with fused qkv.

    Args:
        dim: Model width
        mlp_dim: Feed-forward width

    Returns:
        Learnable scalar count
    """
    return (
        layer_norm_param_count(dim)
        + linear_param_count(dim, 3 * dim)
        + linear_param_count(dim, dim)
        + layer_norm_param_count(dim)
        + linear_param_count(dim, mlp_dim)
        + linear_param_count(mlp_dim, dim)
    )


def vit_param_count(spec: ViTSpec) -> int:
    """Learnable scalars of a ViT instantiated from ``spec``."""
    d = spec.hidden_dim
    patch = d * spec.in_channels * spec.patch_size * spec.patch_size + d
    class_token = d
    positions = spec.seq_length * d
    blocks = spec.num_layers * transformer_block_param_count(d, spec.mlp_dim)
    final_norm = layer_norm_param_count(d)
    head = linear_param_count(d, spec.num_classes)
    return patch + class_token + positions + blocks + final_norm + head


def gpt_param_count(spec: GPTSpec) -> int:
    """Learnable scalars of a GPT-2-style LM instantiated from ``spec``."""
    d = spec.embed_dim
    tokens = spec.vocab_size * d
    positions = spec.context_length * d
    blocks = spec.num_layers * transformer_block_param_count(d, spec.mlp_dim)
    final_norm = layer_norm_param_count(d)
    # Tied heads share the token embedding; the LM head has no bias
    lm_head = 0 if spec.tie_word_embeddings else spec.vocab_size * d
    return tokens + positions + blocks + final_norm + lm_head


def spec_param_count(spec: ArchSpec) -> int:
    """
    Exact count of learnable scalars in the network a spec instantiates.

    Args:
        spec: Architecture spec

    Returns:
        Learnable scalar count

    Raises:
        SpecValidationError: If the spec is invalid
    """
    spec.validate()
    if isinstance(spec, ViTSpec):
        return vit_param_count(spec)
    if isinstance(spec, GPTSpec):
        return gpt_param_count(spec)
    if isinstance(spec, LinearSpec):
        return linear_param_count(spec.in_features, spec.out_features, spec.bias)
    raise SpecValidationError(f"Unsupported spec type: {type(spec).__name__}")
