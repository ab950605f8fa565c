"""Architecture specifications for target networks."""
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Union

from graphhyper.errors import SpecValidationError


def _require_positive(spec: Any, *names: str) -> None:
    for name in names:
        value = getattr(spec, name)
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise SpecValidationError(f"{type(spec).__name__}.{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class ViTSpec:
    """ViT-style image classifier configuration."""
    num_layers: int
    num_heads: int
    hidden_dim: int
    mlp_dim: int
    patch_size: int = 2
    image_size: int = 32
    num_classes: int = 100
    in_channels: int = 3

    kind = "vit"

    @property
    def num_patches(self) -> int:
        """Number of patch tokens (the class token is extra)."""
        return (self.image_size // self.patch_size) ** 2

    @property
    def seq_length(self) -> int:
        """Sequence length including the class token."""
        return self.num_patches + 1

    def validate(self) -> "ViTSpec":
        """
        Check the spec's invariants.

        Returns:
            The spec itself, for chaining

        Raises:
            SpecValidationError: If any invariant is violated
        """
        _require_positive(self, "num_layers", "num_heads", "hidden_dim", "mlp_dim",
                          "patch_size", "image_size", "num_classes", "in_channels")
        if self.hidden_dim % self.num_heads != 0:
            raise SpecValidationError(
                f"hidden_dim {self.hidden_dim} is not divisible by num_heads {self.num_heads}"
            )
        if self.mlp_dim != 4 * self.hidden_dim:
            raise SpecValidationError(f"mlp_dim {self.mlp_dim} must equal 4 x hidden_dim ({4 * self.hidden_dim})")
        if self.image_size % self.patch_size != 0:
            raise SpecValidationError(
                f"image_size {self.image_size} is not divisible by patch_size {self.patch_size}"
            )
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)


@dataclass(frozen=True)
class GPTSpec:
    """GPT-2-style causal language model configuration."""
    num_layers: int
    num_heads: int
    embed_dim: int
    vocab_size: int = 50257
    context_length: int = 1024
    tie_word_embeddings: bool = False

    kind = "gpt2"

    @property
    def mlp_dim(self) -> int:
        """Feed-forward width (4 x embed_dim, as in GPT-2)."""
        return 4 * self.embed_dim

    def validate(self) -> "GPTSpec":
        """
        Check the spec's invariants.

        Returns:
            The spec itself, for chaining

        Raises:
            SpecValidationError: If any invariant is violated
        """
        _require_positive(self, "num_layers", "num_heads", "embed_dim", "vocab_size", "context_length")
        if self.embed_dim % self.num_heads != 0:
            raise SpecValidationError(
                f"embed_dim {self.embed_dim} is not divisible by num_heads {self.num_heads}"
            )
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)


@dataclass(frozen=True)
class LinearSpec:
    """A single linear classifier, the smallest target family."""
    in_features: int
    out_features: int
    bias: bool = True

    kind = "linear"

    def validate(self) -> "LinearSpec":
        """Check the spec's invariants."""
        _require_positive(self, "in_features", "out_features")
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return asdict(self)


ArchSpec = Union[ViTSpec, GPTSpec, LinearSpec]

SPEC_TYPES = {
    "vit": ViTSpec,
    "gpt2": GPTSpec,
    "linear": LinearSpec,
}


def spec_from_dict(kind: str, config: Dict[str, Any]) -> ArchSpec:
    """
    Rebuild a spec from its kind tag and field dictionary.

    Args:
        kind: ``vit``, ``gpt2`` or ``linear``
        config: Field values

    Returns:
        Validated spec

    Raises:
        SpecValidationError: On unknown kinds, unknown fields or invalid values
    """
    spec_type = SPEC_TYPES.get(kind)
    if spec_type is None:
        raise SpecValidationError(f"Unknown architecture kind: {kind!r}")
    known = {f.name for f in fields(spec_type)}
    unknown = set(config) - known
    if unknown:
        raise SpecValidationError(f"Unknown {kind} fields: {sorted(unknown)}")
    try:
        spec = spec_type(**config)
    except TypeError as e:
        raise SpecValidationError(f"Incomplete {kind} config: {e}") from e
    return spec.validate()


# Reference sizes of the target families
PRESETS: Dict[str, ArchSpec] = {
    "vit-s": ViTSpec(num_layers=12, num_heads=6, hidden_dim=384, mlp_dim=1536,
                     patch_size=16, image_size=224, num_classes=1000),
    "vit-b": ViTSpec(num_layers=12, num_heads=12, hidden_dim=768, mlp_dim=3072,
                     patch_size=16, image_size=224, num_classes=1000),
    "vit-l": ViTSpec(num_layers=24, num_heads=16, hidden_dim=1024, mlp_dim=4096,
                     patch_size=16, image_size=224, num_classes=1000),
    "gpt2-s": GPTSpec(num_layers=12, num_heads=12, embed_dim=768, tie_word_embeddings=True),
    "gpt2-m": GPTSpec(num_layers=24, num_heads=16, embed_dim=1024, tie_word_embeddings=True),
    "gpt2-l": GPTSpec(num_layers=36, num_heads=20, embed_dim=1280, tie_word_embeddings=True),
}


def get_preset(name: str, **overrides: Any) -> ArchSpec:
    """
    Get a preset spec, optionally with fields replaced.

    Args:
        name: Preset name (``vit-s``, ``gpt2-m``, ...)
        **overrides: Field replacements (e.g. ``num_classes=100``)

    Returns:
        Validated spec

    Raises:
        SpecValidationError: If the preset is unknown or overrides are invalid
    """
    key = name.lower()
    if key not in PRESETS:
        raise SpecValidationError(f"Unknown preset '{name}'. Available: {', '.join(sorted(PRESETS))}")
    spec = PRESETS[key]
    if overrides:
        try:
            spec = replace(spec, **overrides)
        except TypeError as e:
            raise SpecValidationError(f"Invalid override for preset '{name}': {e}") from e
    return spec.validate()
