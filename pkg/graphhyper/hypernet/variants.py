"""Named hypernetwork configurations."""
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict

from graphhyper.errors import ConfigError

LOWRANK = "lowrank"
TILED = "tiled"


@dataclass(frozen=True)
class GHNConfig:
    """
    Full hypernetwork configuration.

    Attributes:
        decoder: ``lowrank`` or ``tiled``
        d: Feature width
        num_layers: Encoder layers
        num_heads: Encoder attention heads
        r: Factor rank (low-rank decoder only)
        K: Max mask (low-rank decoder only)
        num_classes: Class-head outputs (tiled decoder only)
        max_distance: Attention-bias distance clip
        max_degree: Degree-embedding clip
        chunk_size: Nodes decoded per chunk
        allow_fallback: Randomly initialize tensors wider than K
    """
    decoder: str = LOWRANK
    d: int = 64
    num_layers: int = 3
    num_heads: int = 8
    r: int = 32
    K: int = 32768
    num_classes: int = 100
    max_distance: int = 8
    max_degree: int = 32
    chunk_size: int = 64
    allow_fallback: bool = True

    def validate(self) -> "GHNConfig":
        if self.decoder not in (LOWRANK, TILED):
            raise ConfigError(f"Unknown decoder '{self.decoder}' (expected '{LOWRANK}' or '{TILED}')")
        for name in ("d", "num_heads", "r", "K", "chunk_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"GHN {name} must be positive, got {getattr(self, name)}")
        if self.num_layers < 0 or self.num_classes < 0:
            raise ConfigError("GHN num_layers and num_classes must be non-negative")
        if self.d % self.num_heads != 0:
            raise ConfigError(f"GHN width {self.d} is not divisible by {self.num_heads} heads")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GHNConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown GHN config keys: {sorted(unknown)}")
        return cls(**data).validate()


VARIANTS: Dict[str, GHNConfig] = {
    "tiny": GHNConfig(LOWRANK, d=64, num_layers=3, num_heads=8, r=32),
    "small": GHNConfig(LOWRANK, d=128, num_layers=5, num_heads=16, r=90),
    "base": GHNConfig(LOWRANK, d=256, num_layers=5, num_heads=16, r=128),
    "large": GHNConfig(LOWRANK, d=256, num_layers=12, num_heads=16, r=256),
    "tiled-tiny": GHNConfig(TILED, d=64, num_layers=3, num_heads=8),
    "tiled-small": GHNConfig(TILED, d=128, num_layers=5, num_heads=16),
    "tiled-large": GHNConfig(TILED, d=256, num_layers=12, num_heads=16),
    "tiled-xlarge": GHNConfig(TILED, d=384, num_layers=24, num_heads=16),
}

# Reference totals the constructed variants are compared against
REFERENCE_TOTALS: Dict[str, float] = {
    "tiny": 2.5e6,
    "small": 21.4e6,
    "base": 78.2e6,
    "large": 289.4e6,
    "tiled-tiny": 6.9e6,
    "tiled-small": 35.8e6,
    "tiled-large": 214.7e6,
}


def get_variant(name: str, **overrides: Any) -> GHNConfig:
    """
    Look up a variant, optionally replacing fields.

    ``custom`` starts from the defaults and requires overrides to be useful.

    Raises:
        ConfigError: On unknown names or invalid overrides
    """
    key = name.lower()
    if key == "custom":
        base = GHNConfig()
    elif key in VARIANTS:
        base = VARIANTS[key]
    else:
        raise ConfigError(f"Unknown GHN variant '{name}'. Available: {', '.join(VARIANTS)}, custom")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        return replace(base, **overrides).validate()
    except TypeError as e:
        raise ConfigError(f"Invalid override for variant '{name}': {e}") from e
