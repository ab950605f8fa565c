"""Learning-rate schedule."""
import math

import torch


def cosine_lr(base_lr: float, step: int, total_steps: int) -> float:
    """
    Cosine annealing from ``base_lr`` at step 0 to 0 at ``total_steps``.

    Steps past the end stay at 0.
    """
    if total_steps <= 0:
        return base_lr
    progress = min(step, total_steps) / total_steps
    return 0.5 * base_lr * (1.0 + math.cos(math.pi * progress))


def step_lr(base_lr: float, step: int, total_steps: int) -> float:
    """Learning rate for 0-based step ``step`` of ``total_steps``; the last step uses 0."""
    return cosine_lr(base_lr, step, total_steps - 1) if total_steps > 1 else base_lr


def set_lr(optimizer: torch.optim.Optimizer, lr: float) -> None:
    for group in optimizer.param_groups:
        group["lr"] = lr
