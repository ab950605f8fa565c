"""Random sampling of training architectures."""
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from graphhyper.archspace.specs import GPTSpec, ViTSpec
from graphhyper.errors import SpecValidationError


@dataclass(frozen=True)
class WidthBranch:
    """Width range used when the sampled depth is strictly above ``above_layers``."""
    above_layers: int
    dim_min: int
    dim_max: int


@dataclass(frozen=True)
class ViTSearchSpace:
    """Depth-conditioned sampling space for ViT-style networks."""
    name: str
    min_layers: int
    max_layers: int
    branches: Tuple[WidthBranch, ...]
    width_step: int = 32
    patch_size: int = 2
    image_size: int = 32
    num_classes: int = 100


@dataclass(frozen=True)
class GPTSearchSpace:
    """Depth-conditioned sampling space for GPT-2-style networks."""
    name: str
    min_layers: int
    max_layers: int
    branches: Tuple[WidthBranch, ...]
    width_step: int = 8
    head_choices: Tuple[int, ...] = (8, 6, 4)
    vocab_size: int = 50257
    context_length: int = 1024


SearchSpace = Union[ViTSearchSpace, GPTSearchSpace]

# Deeper networks are kept narrower so parameter counts spread evenly
VIT_SPACE = ViTSearchSpace(
    name="vit",
    min_layers=3,
    max_layers=9,
    branches=(WidthBranch(5, 128, 256), WidthBranch(3, 256, 384), WidthBranch(0, 384, 512)),
)

GPT_SPACE = GPTSearchSpace(
    name="gpt2",
    min_layers=3,
    max_layers=9,
    branches=(WidthBranch(5, 72, 176), WidthBranch(3, 128, 176), WidthBranch(0, 176, 256)),
)

# Desk-scale spaces for quick experiments and tests
VIT_TINY_SPACE = ViTSearchSpace(
    name="vit-tiny",
    min_layers=1,
    max_layers=3,
    branches=(WidthBranch(2, 16, 32), WidthBranch(1, 24, 40), WidthBranch(0, 32, 48)),
    width_step=8,
    patch_size=2,
    image_size=8,
    num_classes=10,
)

GPT_TINY_SPACE = GPTSearchSpace(
    name="gpt2-tiny",
    min_layers=1,
    max_layers=3,
    branches=(WidthBranch(2, 16, 32), WidthBranch(1, 24, 40), WidthBranch(0, 32, 48)),
    width_step=8,
    vocab_size=64,
    context_length=32,
)

SEARCH_SPACES: Dict[str, SearchSpace] = {
    space.name: space for space in (VIT_SPACE, GPT_SPACE, VIT_TINY_SPACE, GPT_TINY_SPACE)
}


def get_search_space(name: str) -> SearchSpace:
    """
    Look up a named search space.

    Args:
        name: ``vit``, ``gpt2``, ``vit-tiny`` or ``gpt2-tiny``

    Returns:
        The search space

    Raises:
        SpecValidationError: If the name is unknown
    """
    if name not in SEARCH_SPACES:
        raise SpecValidationError(f"Unknown search space '{name}'. Available: {', '.join(SEARCH_SPACES)}")
    return SEARCH_SPACES[name]


def width_range(space: SearchSpace, num_layers: int) -> Sequence[int]:
    """
    Admissible widths for a given depth.

    Args:
        space: Search space
        num_layers: Sampled depth

    Returns:
        Arithmetic range of widths, both bounds inclusive
    """
    for branch in space.branches:
        if num_layers > branch.above_layers:
            return list(range(branch.dim_min, branch.dim_max + 1, space.width_step))
    raise SpecValidationError(f"No width branch in space '{space.name}' covers {num_layers} layers")


def vit_head_choices(hidden_dim: int) -> Tuple[int, ...]:
    """Head counts admissible for a ViT width, by the modulus rule."""
    if hidden_dim % 12 == 0:
        return (3, 6, 12)
    if hidden_dim % 6 == 0:
        return (3, 6)
    if hidden_dim % 3 == 0:
        return (3,)
    choices = tuple(h for h in (4, 8) if hidden_dim % h == 0)
    if not choices:
        raise SpecValidationError(f"No admissible head count for hidden_dim {hidden_dim}")
    return choices


def gpt_head_count(embed_dim: int, choices: Sequence[int] = (8, 6, 4)) -> int:
    """Largest admissible head count dividing ``embed_dim``."""
    for heads in choices:
        if embed_dim % heads == 0:
            return heads
    raise SpecValidationError(f"No head count in {tuple(choices)} divides embed_dim {embed_dim}")


def sample_vit_spec(rng: np.random.Generator, space: Optional[ViTSearchSpace] = None) -> ViTSpec:
    """
    Draw one ViT-style training architecture.

    Args:
        rng: Seeded numpy generator
        space: Sampling space (defaults to the 1K-architecture ViT space)

    Returns:
        Validated ViT spec
    """
    space = space or VIT_SPACE
    layers = int(rng.integers(space.min_layers, space.max_layers + 1))
    hidden_dim = int(rng.choice(width_range(space, layers)))
    heads = int(rng.choice(vit_head_choices(hidden_dim)))
    return ViTSpec(
        num_layers=layers,
        num_heads=heads,
        hidden_dim=hidden_dim,
        mlp_dim=4 * hidden_dim,
        patch_size=space.patch_size,
        image_size=space.image_size,
        num_classes=space.num_classes,
    ).validate()


def sample_gpt_spec(rng: np.random.Generator, space: Optional[GPTSearchSpace] = None) -> GPTSpec:
    """
    Draw one GPT-2-style training architecture.

    Args:
        rng: Seeded numpy generator
        space: Sampling space (defaults to the 1K-architecture GPT-2 space)

    Returns:
        Validated GPT spec with untied embeddings
    """
    space = space or GPT_SPACE
    layers = int(rng.integers(space.min_layers, space.max_layers + 1))
    embed_dim = int(rng.choice(width_range(space, layers)))
    return GPTSpec(
        num_layers=layers,
        num_heads=gpt_head_count(embed_dim, space.head_choices),
        embed_dim=embed_dim,
        vocab_size=space.vocab_size,
        context_length=space.context_length,
        tie_word_embeddings=False,
    ).validate()


def sample_spec(rng: np.random.Generator, space: SearchSpace) -> Union[ViTSpec, GPTSpec]:
    """Draw from whichever family ``space`` describes."""
    if isinstance(space, ViTSearchSpace):
        return sample_vit_spec(rng, space)
    return sample_gpt_spec(rng, space)
