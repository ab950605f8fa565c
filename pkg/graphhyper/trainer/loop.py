"""Hypernetwork training."""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch

from graphhyper.archspace.dataset import ArchDataset
from graphhyper.decoder.predict import PredictedParameterSet
from graphhyper.errors import ConfigError, NumericError
from graphhyper.graphir.builder import build_graph
from graphhyper.graphir.graph import CompGraph
from graphhyper.hypernet.network import GraphHyperNetwork
from graphhyper.nets.registry import task_loss
from graphhyper.progress.base import ProgressCallback, ProgressTracker
from graphhyper.progress.csv_log import CsvLogCallback
from graphhyper.trainer.checkpoint import Checkpoint
from graphhyper.trainer.config import TrainConfig
from graphhyper.trainer.schedule import set_lr, step_lr
from graphhyper.trainer.tasks import TaskDataset, check_task_compatible

logger = logging.getLogger("graphhyper.trainer")

LOG_COLUMNS = ["step", "epoch", "lr", "task_loss", "reg_loss"]


@dataclass(frozen=True)
class StepResult:
    """Loss terms of one training step (total = task + gamma * reg)."""
    loss: float
    task_loss: float
    reg_loss: float


def squared_norm(params: PredictedParameterSet) -> torch.Tensor:
    """Sum of squared predicted (non-fallback) parameters."""
    tensors = params.predicted_tensors()
    if not tensors:
        return torch.zeros(())
    return sum((t ** 2).sum() for t in tensors)


def meta_batch_loss(ghn: GraphHyperNetwork, graphs: Sequence[CompGraph], batch: Tuple[torch.Tensor, ...],
                    gamma: float) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """
    Loss of predicting and evaluating every graph on the same mini-batch.

    Task and penalty terms are both averaged over the graphs.

    Returns:
        ``(total, task, reg)`` as differentiable tensors

    Raises:
        NumericError: If a graph's loss is non-finite, naming the graph
    """
    task_terms, reg_terms = [], []
    for graph in graphs:
        params = ghn(graph)
        task = task_loss(params.tensors, batch, graph.arch)
        if not torch.isfinite(task):
            raise NumericError("Non-finite task loss", where=f"graph '{graph.id}'")
        task_terms.append(task)
        reg_terms.append(squared_norm(params))
    task = torch.stack(task_terms).mean()
    reg = torch.stack([r.to(task.dtype) for r in reg_terms]).mean()
    return task + gamma * reg, task, reg


def make_optimizer(ghn: GraphHyperNetwork, cfg: TrainConfig) -> torch.optim.Optimizer:
    if cfg.optimizer == "sgd":
        return torch.optim.SGD(ghn.parameters(), lr=cfg.base_lr, momentum=0.9, weight_decay=cfg.weight_decay)
    return torch.optim.AdamW(ghn.parameters(), lr=cfg.base_lr, weight_decay=cfg.weight_decay)


def ghn_training_step(ghn: GraphHyperNetwork, optimizer: torch.optim.Optimizer, graphs: Sequence[CompGraph],
                      batch: Tuple[torch.Tensor, ...], cfg: TrainConfig) -> StepResult:
    """
    One optimizer step on a meta-batch of graphs and a mini-batch of samples.

    Raises:
        NumericError: If the loss is non-finite; no update is applied
    """
    ghn.train()
    optimizer.zero_grad(set_to_none=True)
    device_type = next(ghn.parameters()).device.type
    with torch.autocast(device_type=device_type, enabled=cfg.amp and device_type == "cuda"):
        total, task, reg = meta_batch_loss(ghn, graphs, batch, cfg.gamma)
    if not torch.isfinite(total):
        raise NumericError("Non-finite total loss", where=", ".join(g.id for g in graphs))
    total.backward()
    if cfg.grad_clip > 0:
        torch.nn.utils.clip_grad_norm_(ghn.parameters(), cfg.grad_clip)
    optimizer.step()
    return StepResult(float(total.detach()), float(task.detach()), float(reg.detach()))


def batch_generator(seed: int, step: int) -> torch.Generator:
    """Sampling generator for a given step, independent of earlier steps."""
    return torch.Generator().manual_seed(int(np.random.SeedSequence([seed, step]).generate_state(1)[0]))


def epoch_order(seed: int, epoch: int, size: int) -> np.ndarray:
    """Shuffled architecture order for an epoch."""
    return np.random.default_rng([seed, epoch]).permutation(size)


def train(ghn: GraphHyperNetwork, arch_dataset: ArchDataset, task: TaskDataset, cfg: TrainConfig,
          out_path: Optional[str] = None, log_path: Optional[str] = None, resume: Optional[str] = None,
          progress_callback: Optional[ProgressCallback] = None) -> Checkpoint:
    """
    Train a hypernetwork over an architecture dataset.

    Args:
        ghn: Hypernetwork (updated in place)
        arch_dataset: Training architectures
        task: Task the predicted networks are evaluated on
        cfg: Training configuration
        out_path: Checkpoint file, written periodically and at the end
        log_path: CSV training log
        resume: Checkpoint to continue from
        progress_callback: Optional progress sink

    Returns:
        Final checkpoint

    Raises:
        ConfigError: If the datasets are empty or the task does not fit the architectures
    """
    cfg.validate()
    if len(arch_dataset) == 0 or len(task) == 0:
        raise ConfigError("Architecture and task datasets must be non-empty")
    for record in arch_dataset:
        check_task_compatible(record.spec, task)

    graphs: List[CompGraph] = [build_graph(record.spec, record.id) for record in arch_dataset]
    steps_per_epoch = math.ceil(len(graphs) / cfg.meta_batch)
    total_steps = cfg.epochs * steps_per_epoch
    if cfg.max_steps is not None:
        total_steps = min(total_steps, cfg.max_steps)

    optimizer = make_optimizer(ghn, cfg)
    step = 0
    if resume:
        checkpoint = Checkpoint.load(resume)
        if checkpoint.kind not in (None, arch_dataset.kind):
            raise ConfigError(f"Checkpoint was trained on '{checkpoint.kind}', dataset is '{arch_dataset.kind}'")
        ghn.load_state_dict(checkpoint.state_dict)
        if checkpoint.optimizer_state:
            optimizer.load_state_dict(checkpoint.optimizer_state)
        if checkpoint.rng_state is not None:
            torch.set_rng_state(checkpoint.rng_state)
        step = checkpoint.step
        logger.info(f"Resuming from {resume} at step {step}")

    tracker = ProgressTracker("train-ghn", total=total_steps)
    csv_log = CsvLogCallback(log_path, LOG_COLUMNS) if log_path else None
    if csv_log:
        if resume:
            csv_log.restore(step)
        tracker.add_callback(csv_log)
    if progress_callback:
        tracker.add_callback(progress_callback)
    tracker.start(f"Training on {len(graphs)} {arch_dataset.kind} graphs for {total_steps} steps "
                  f"(m={cfg.meta_batch}, n={cfg.mini_batch})")

    def snapshot(at_step: int) -> Checkpoint:
        return Checkpoint.from_model(
            ghn, step=at_step, epoch=at_step // steps_per_epoch, kind=arch_dataset.kind,
            train_config=cfg.to_dict(), optimizer_state=optimizer.state_dict(), rng_state=torch.get_rng_state(),
        )

    try:
        while step < total_steps:
            epoch, offset = divmod(step, steps_per_epoch)
            order = epoch_order(cfg.seed, epoch, len(graphs))
            members = order[offset * cfg.meta_batch:(offset + 1) * cfg.meta_batch]
            batch = task.batch(cfg.mini_batch, batch_generator(cfg.seed, step))
            lr = step_lr(cfg.base_lr, step, total_steps)
            set_lr(optimizer, lr)
            result = ghn_training_step(ghn, optimizer, [graphs[i] for i in members], batch, cfg)
            step += 1
            tracker.update(step, epoch=epoch, lr=lr, task_loss=result.task_loss, reg_loss=result.reg_loss)
            if out_path and cfg.checkpoint_every and step % cfg.checkpoint_every == 0 and step < total_steps:
                snapshot(step).save(out_path)
                if csv_log:
                    csv_log.flush()
    except Exception as e:
        logger.error(f"Training failed at step {step}: {e}", exc_info=True)
        tracker.fail(str(e))
        raise

    final = snapshot(step)
    if out_path:
        final.save(out_path)
    tracker.complete(f"Training finished after {step} steps")
    return final
