"""Supervised fine-tuning of target networks from a given initialization."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import torch
import torch.nn.functional as F

from graphhyper.archspace.specs import ArchSpec, GPTSpec
from graphhyper.nets.registry import check_parameters, forward, task_loss
from graphhyper.trainer.config import FinetuneConfig
from graphhyper.trainer.loop import batch_generator
from graphhyper.trainer.schedule import cosine_lr, set_lr
from graphhyper.trainer.tasks import TaskDataset, check_task_compatible

logger = logging.getLogger("graphhyper.trainer.finetune")

ACCURACY = "accuracy"
PERPLEXITY = "perplexity"

# Samples scored per forward pass during evaluation
EVAL_CHUNK = 256


@dataclass
class Evaluation:
    """Task loss and headline metric (top-1 accuracy or perplexity)."""
    step: int
    loss: float
    metric: float
    metric_name: str

    def to_dict(self) -> Dict[str, float]:
        return {"step": self.step, "loss": self.loss, self.metric_name: self.metric}


@dataclass
class FinetuneResult:
    """
    Attributes:
        params: Parameters after the last step
        curve: Evaluations in step order (always includes step 0 and the last step)
        lr: Learning rate that produced this result
    """
    params: Dict[str, torch.Tensor]
    curve: List[Evaluation] = field(default_factory=list)
    lr: float = 0.0

    @property
    def final(self) -> Evaluation:
        return self.curve[-1]


@torch.no_grad()
def evaluate(params: Mapping[str, torch.Tensor], spec: ArchSpec, task: TaskDataset, step: int = 0) -> Evaluation:
    """
    Score ``params`` on the whole task.

    Classification reports top-1 accuracy; language modeling reports
    perplexity, the exponential of the mean next-token cross-entropy.
    """
    if isinstance(spec, GPTSpec):
        total, count = 0.0, 0
        for start in range(0, len(task), EVAL_CHUNK):
            tokens = task.tokens[start:start + EVAL_CHUNK]
            logits = forward(params, tokens[:, :-1], spec)
            total += float(F.cross_entropy(logits.reshape(-1, logits.shape[-1]), tokens[:, 1:].reshape(-1),
                                           reduction="sum"))
            count += tokens[:, 1:].numel()
        loss = total / count
        return Evaluation(step, loss, math.exp(loss), PERPLEXITY)

    total, correct = 0.0, 0
    for start in range(0, len(task), EVAL_CHUNK):
        images = task.images[start:start + EVAL_CHUNK]
        labels = task.labels[start:start + EVAL_CHUNK]
        logits = forward(params, images, spec)
        total += float(F.cross_entropy(logits, labels, reduction="sum"))
        correct += int((logits.argmax(dim=-1) == labels).sum())
    return Evaluation(step, total / len(task), correct / len(task), ACCURACY)


def _better(a: Evaluation, b: Evaluation) -> bool:
    if a.metric_name == PERPLEXITY:
        return a.metric < b.metric
    return a.metric > b.metric


def _finetune_once(params: Mapping[str, torch.Tensor], spec: ArchSpec, task: TaskDataset, cfg: FinetuneConfig,
                   lr: float, eval_task: TaskDataset) -> FinetuneResult:
    weights = {name: t.detach().clone().requires_grad_(True) for name, t in params.items()}
    trainable = list(weights.values())
    if cfg.optimizer == "sgd":
        optimizer = torch.optim.SGD(trainable, lr=lr, momentum=0.9, weight_decay=cfg.weight_decay)
    else:
        optimizer = torch.optim.AdamW(trainable, lr=lr, weight_decay=cfg.weight_decay)

    result = FinetuneResult(params=weights, curve=[evaluate(weights, spec, eval_task, 0)], lr=lr)
    for step in range(cfg.steps):
        set_lr(optimizer, cosine_lr(lr, step, cfg.steps))
        optimizer.zero_grad(set_to_none=True)
        batch = task.batch(cfg.batch_size, batch_generator(cfg.seed, step))
        loss = task_loss(weights, batch, spec)
        loss.backward()
        optimizer.step()
        done = step + 1
        if done == cfg.steps or (cfg.eval_every and done % cfg.eval_every == 0):
            result.curve.append(evaluate(weights, spec, eval_task, done))
            logger.debug(f"lr={lr:g} step {done}: {result.curve[-1].to_dict()}")

    result.params = {name: t.detach() for name, t in weights.items()}
    return result


def finetune(params: Mapping[str, torch.Tensor], spec: ArchSpec, task: TaskDataset, cfg: FinetuneConfig,
             eval_task: Optional[TaskDataset] = None) -> FinetuneResult:
    """
    Fine-tune a target network starting from ``params``.

    Args:
        params: Initial tensors by name (not modified)
        spec: Target architecture
        task: Training data
        cfg: Optimizer settings; with ``cfg.lrs`` every rate is tried from the
            same initialization and the best final metric is returned
        eval_task: Data for the metric curve (defaults to ``task``)

    Returns:
        Final parameters and metric curve

    Raises:
        InitializationError: If a tensor is missing or mis-shaped
        ConfigError: If the task cannot feed the architecture
    """
    cfg.validate()
    check_parameters(params, spec)
    check_task_compatible(spec, task)
    eval_task = eval_task or task

    best: Optional[FinetuneResult] = None
    for lr in cfg.lrs or (cfg.lr,):
        result = _finetune_once(params, spec, task, cfg, lr, eval_task)
        logger.info(f"Fine-tuned {cfg.steps} steps at lr={lr:g}: {result.final.to_dict()}")
        if best is None or _better(result.final, best.final):
            best = result
    return best
