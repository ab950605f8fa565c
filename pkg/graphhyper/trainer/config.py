"""Training and fine-tuning configuration."""
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional, Tuple

from graphhyper.errors import ConfigError

OPTIMIZERS = ("adamw", "sgd")


@dataclass(frozen=True)
class TrainConfig:
    """
    Hypernetwork training settings.

    Attributes:
        meta_batch: Architectures per step (m)
        mini_batch: Task samples per step (n)
        epochs: Passes over the architecture dataset
        base_lr: Peak learning rate, annealed to 0 by a cosine schedule
        weight_decay: Decoupled weight decay
        gamma: Coefficient of the squared predicted-parameter penalty
        optimizer: ``adamw`` or ``sgd``
        seed: Seeds data order, batches and initialization
        checkpoint_every: Steps between checkpoints (0 saves only at the end)
        grad_clip: Gradient-norm clip (0 disables)
        amp: Mixed precision on CUDA
        max_steps: Stop early after this many steps
    """
    meta_batch: int = 1
    mini_batch: int = 64
    epochs: int = 1
    base_lr: float = 3e-4
    weight_decay: float = 1e-2
    gamma: float = 3e-5
    optimizer: str = "adamw"
    seed: int = 0
    checkpoint_every: int = 0
    grad_clip: float = 5.0
    amp: bool = False
    max_steps: Optional[int] = None

    def validate(self) -> "TrainConfig":
        if self.meta_batch < 1 or self.mini_batch < 1:
            raise ConfigError(f"meta_batch and mini_batch must be >= 1 (got {self.meta_batch}, {self.mini_batch})")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"Unknown optimizer '{self.optimizer}' (expected one of {OPTIMIZERS})")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known}).validate()


@dataclass(frozen=True)
class FinetuneConfig:
    """
    Supervised fine-tuning settings.

    Attributes:
        optimizer: ``sgd`` (momentum 0.9) or ``adamw``
        lr: Learning rate, cosine-annealed over ``steps``
        weight_decay: Weight decay
        steps: Optimizer steps
        batch_size: Samples per step
        eval_every: Steps between metric evaluations (0 evaluates only at the ends)
        seed: Seeds batch sampling
        lrs: Optional sweep; the best final metric is reported
    """
    optimizer: str = "sgd"
    lr: float = 0.1
    weight_decay: float = 1e-2
    steps: int = 100
    batch_size: int = 64
    eval_every: int = 0
    seed: int = 0
    lrs: Tuple[float, ...] = ()

    def validate(self) -> "FinetuneConfig":
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"Unknown optimizer '{self.optimizer}' (expected one of {OPTIMIZERS})")
        if self.steps < 0 or self.batch_size < 1:
            raise ConfigError(f"steps must be >= 0 and batch_size >= 1 (got {self.steps}, {self.batch_size})")
        return self

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FinetuneConfig":
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in data.items() if k in known}
        if "lrs" in values:
            values["lrs"] = tuple(float(v) for v in values["lrs"])
        return cls(**values).validate()
