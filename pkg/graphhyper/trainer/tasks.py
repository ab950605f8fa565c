"""Task datasets: image classification and token corpora."""
import logging
import os
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import torch

from graphhyper.archspace.specs import ArchSpec, GPTSpec, LinearSpec, ViTSpec
from graphhyper.errors import ConfigError

logger = logging.getLogger("graphhyper.trainer.tasks")

IMAGES_FILE = "images.npy"
LABELS_FILE = "labels.npy"
TOKENS_FILE = "tokens.npy"


@dataclass
class ImageTaskDataset:
    """Images (N, C, H, W) float32 with integer labels (N,)."""
    images: torch.Tensor
    labels: torch.Tensor
    kind = "images"

    def __post_init__(self):
        if self.images.ndim != 4 or self.labels.ndim != 1 or len(self.images) != len(self.labels):
            raise ConfigError(f"Image task needs (N,C,H,W) images and (N,) labels, got "
                              f"{tuple(self.images.shape)} and {tuple(self.labels.shape)}")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def image_size(self) -> int:
        return int(self.images.shape[-1])

    @property
    def channels(self) -> int:
        return int(self.images.shape[1])

    def batch(self, n: int, generator: torch.Generator) -> Tuple[torch.Tensor, torch.Tensor]:
        """``n`` samples drawn without replacement (with replacement if ``n`` exceeds the set)."""
        index = _draw(len(self), n, generator)
        return self.images[index], self.labels[index]

    def split(self, holdout: float) -> Tuple["ImageTaskDataset", "ImageTaskDataset"]:
        """Leading part for training, trailing ``holdout`` fraction for evaluation."""
        cut = _cut(len(self), holdout)
        return (ImageTaskDataset(self.images[:cut], self.labels[:cut]),
                ImageTaskDataset(self.images[cut:], self.labels[cut:]))

    @classmethod
    def load(cls, path: str) -> "ImageTaskDataset":
        images = np.load(os.path.join(path, IMAGES_FILE))
        labels = np.load(os.path.join(path, LABELS_FILE))
        logger.info(f"Loaded {len(labels)} images of shape {images.shape[1:]} from {path}")
        return cls(torch.from_numpy(images.astype(np.float32)), torch.from_numpy(labels.astype(np.int64)))

    def save(self, path: str) -> None:
        os.makedirs(path, exist_ok=True)
        np.save(os.path.join(path, IMAGES_FILE), self.images.numpy())
        np.save(os.path.join(path, LABELS_FILE), self.labels.numpy())


@dataclass
class TokenTaskDataset:
    """Pre-tokenized sequences (N, T) of integer ids."""
    tokens: torch.Tensor
    vocab_size: Optional[int] = None
    kind = "tokens"

    def __post_init__(self):
        if self.tokens.ndim != 2 or self.tokens.shape[1] < 2:
            raise ConfigError(f"Token task needs (N, T>=2) sequences, got {tuple(self.tokens.shape)}")
        if self.vocab_size is None:
            self.vocab_size = int(self.tokens.max()) + 1

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def sequence_length(self) -> int:
        return int(self.tokens.shape[1])

    def batch(self, n: int, generator: torch.Generator) -> Tuple[torch.Tensor]:
        return (self.tokens[_draw(len(self), n, generator)],)

    def split(self, holdout: float) -> Tuple["TokenTaskDataset", "TokenTaskDataset"]:
        cut = _cut(len(self), holdout)
        return (TokenTaskDataset(self.tokens[:cut], self.vocab_size),
                TokenTaskDataset(self.tokens[cut:], self.vocab_size))

    @classmethod
    def load(cls, path: str) -> "TokenTaskDataset":
        tokens = np.load(os.path.join(path, TOKENS_FILE))
        logger.info(f"Loaded {tokens.shape[0]} sequences of length {tokens.shape[1]} from {path}")
        return cls(torch.from_numpy(tokens.astype(np.int64)))

    def save(self, path: str) -> None:
        os.makedirs(path, exist_ok=True)
        np.save(os.path.join(path, TOKENS_FILE), self.tokens.numpy())


TaskDataset = Union[ImageTaskDataset, TokenTaskDataset]


def _draw(size: int, n: int, generator: torch.Generator) -> torch.Tensor:
    if n <= size:
        return torch.randperm(size, generator=generator)[:n]
    return torch.randint(size, (n,), generator=generator)


def _cut(size: int, holdout: float) -> int:
    if not 0.0 < holdout < 1.0:
        raise ConfigError(f"holdout must be in (0, 1), got {holdout}")
    cut = int(round(size * (1.0 - holdout)))
    if cut < 1 or cut >= size:
        raise ConfigError(f"Cannot split {size} samples with holdout {holdout}")
    return cut


def load_task(kind: str, path: str) -> TaskDataset:
    """
    Load a task dataset directory.

    Raises:
        ConfigError: On an unknown kind
        FileNotFoundError: If the arrays are missing
    """
    if kind == "images":
        return ImageTaskDataset.load(path)
    if kind == "tokens":
        return TokenTaskDataset.load(path)
    raise ConfigError(f"Unknown task kind '{kind}' (expected 'images' or 'tokens')")


def make_synthetic_images(n: int = 512, num_classes: int = 10, image_size: int = 8, channels: int = 3,
                          noise: float = 0.5, seed: int = 0) -> ImageTaskDataset:
    """
    Class-prototype images plus Gaussian noise.

    Each class has a fixed random prototype; samples are the prototype of
    their label plus ``noise``-scaled noise, so the task is learnable by
    small networks.
    """
    rng = np.random.default_rng(seed)
    prototypes = rng.standard_normal((num_classes, channels, image_size, image_size))
    labels = np.arange(n) % num_classes
    rng.shuffle(labels)
    images = prototypes[labels] + noise * rng.standard_normal((n, channels, image_size, image_size))
    return ImageTaskDataset(torch.from_numpy(images.astype(np.float32)), torch.from_numpy(labels.astype(np.int64)))


def make_synthetic_tokens(n: int = 256, seq_len: int = 33, vocab_size: int = 64, branching: int = 4,
                          seed: int = 0) -> TokenTaskDataset:
    """
    Sequences from a sparse random Markov chain over ``vocab_size`` tokens.

    Every token has ``branching`` equally likely successors, so a good model
    reaches perplexity close to ``branching``.
    """
    rng = np.random.default_rng(seed)
    successors = np.stack([rng.choice(vocab_size, size=branching, replace=False) for _ in range(vocab_size)])
    tokens = np.empty((n, seq_len), dtype=np.int64)
    tokens[:, 0] = rng.integers(vocab_size, size=n)
    for t in range(1, seq_len):
        pick = rng.integers(branching, size=n)
        tokens[:, t] = successors[tokens[:, t - 1], pick]
    return TokenTaskDataset(torch.from_numpy(tokens), vocab_size)


def check_task_compatible(spec: ArchSpec, task: TaskDataset) -> None:
    """
    Raises:
        ConfigError: If the task cannot feed the architecture
    """
    if isinstance(spec, GPTSpec):
        if not isinstance(task, TokenTaskDataset):
            raise ConfigError(f"GPT architectures need a token task, got '{task.kind}'")
        if task.vocab_size > spec.vocab_size:
            raise ConfigError(f"Task vocabulary {task.vocab_size} exceeds model vocabulary {spec.vocab_size}")
        if task.sequence_length - 1 > spec.context_length:
            raise ConfigError(f"Sequences of {task.sequence_length} tokens exceed context {spec.context_length}")
        return
    if not isinstance(task, ImageTaskDataset):
        raise ConfigError(f"{spec.kind} architectures need an image task, got '{task.kind}'")
    if isinstance(spec, ViTSpec):
        if task.image_size != spec.image_size or task.channels != spec.in_channels:
            raise ConfigError(f"Task images are {task.channels}x{task.image_size}px, architecture expects "
                              f"{spec.in_channels}x{spec.image_size}px")
        classes = spec.num_classes
    elif isinstance(spec, LinearSpec):
        if task.images[0].numel() != spec.in_features:
            raise ConfigError(f"Task inputs have {task.images[0].numel()} features, expected {spec.in_features}")
        classes = spec.out_features
    else:
        raise ConfigError(f"Unsupported architecture kind '{spec.kind}'")
    if task.num_classes > classes:
        raise ConfigError(f"Task has {task.num_classes} classes but the architecture outputs {classes}")
