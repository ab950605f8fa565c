"""Hypernetwork checkpoints."""
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, Optional

import torch

from graphhyper.errors import CheckpointError
from graphhyper.graphir.optypes import VOCAB_VERSION
from graphhyper.hypernet.network import GraphHyperNetwork
from graphhyper.hypernet.variants import GHNConfig

logger = logging.getLogger("graphhyper.trainer.checkpoint")

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    """
    Hypernetwork weights plus everything needed to resume training.

    Attributes:
        ghn_config: Model configuration
        state_dict: Embedding, encoder and decoder weights
        step: Optimizer steps taken
        epoch: Epoch the next step belongs to
        kind: Architecture family trained on (``vit``, ``gpt2``), if any
        train_config: TrainConfig snapshot
        optimizer_state: Optimizer state dict
        rng_state: Global torch RNG state
    """
    ghn_config: GHNConfig
    state_dict: Dict[str, torch.Tensor]
    step: int = 0
    epoch: int = 0
    kind: Optional[str] = None
    train_config: Optional[Dict[str, Any]] = None
    optimizer_state: Optional[Dict[str, Any]] = None
    rng_state: Optional[torch.Tensor] = None

    @classmethod
    def from_model(cls, ghn: GraphHyperNetwork, **kwargs: Any) -> "Checkpoint":
        state = {k: v.detach().clone() for k, v in ghn.state_dict().items()}
        return cls(ghn_config=ghn.config, state_dict=state, **kwargs)

    def build_ghn(self) -> GraphHyperNetwork:
        """Instantiate the hypernetwork with the stored weights."""
        ghn = GraphHyperNetwork(self.ghn_config)
        ghn.load_state_dict(self.state_dict)
        return ghn

    def save(self, path: str) -> str:
        """Write a single-file archive with a versioned header."""
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        torch.save({
            "format_version": FORMAT_VERSION,
            "vocab_version": VOCAB_VERSION,
            "kind": self.kind,
            "ghn_config": self.ghn_config.to_dict(),
            "train_config": self.train_config,
            "state_dict": self.state_dict,
            "optimizer_state": self.optimizer_state,
            "step": self.step,
            "epoch": self.epoch,
            "rng_state": self.rng_state,
        }, path)
        logger.info(f"Saved checkpoint at step {self.step} to {path}")
        return path

    @classmethod
    def load(cls, path: str) -> "Checkpoint":
        """
        Read a checkpoint.

        Raises:
            CheckpointError: If the file is missing, unreadable or of another version
        """
        if not os.path.exists(path):
            raise CheckpointError(f"Checkpoint not found: {path}")
        try:
            payload = torch.load(path, map_location="cpu", weights_only=True)
        except Exception as e:
            raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e
        if not isinstance(payload, dict) or payload.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(f"Unsupported checkpoint format in {path}")
        if payload.get("vocab_version") != VOCAB_VERSION:
            raise CheckpointError(
                f"Checkpoint {path} uses op vocabulary v{payload.get('vocab_version')}, expected v{VOCAB_VERSION}"
            )
        return cls(
            ghn_config=GHNConfig.from_dict(payload["ghn_config"]),
            state_dict=payload["state_dict"],
            step=int(payload["step"]),
            epoch=int(payload["epoch"]),
            kind=payload.get("kind"),
            train_config=payload.get("train_config"),
            optimizer_state=payload.get("optimizer_state"),
            rng_state=payload.get("rng_state"),
        )
