"""Hypernetwork training and target-network fine-tuning."""

from .config import TrainConfig, FinetuneConfig
from .schedule import cosine_lr, step_lr
from .tasks import (
    ImageTaskDataset, TokenTaskDataset, TaskDataset, load_task,
    make_synthetic_images, make_synthetic_tokens, check_task_compatible
)
from .checkpoint import Checkpoint
from .loop import StepResult, meta_batch_loss, ghn_training_step, make_optimizer, train
from .finetune import Evaluation, FinetuneResult, evaluate, finetune

__all__ = [
    'TrainConfig',
    'FinetuneConfig',
    'cosine_lr',
    'step_lr',
    'ImageTaskDataset',
    'TokenTaskDataset',
    'TaskDataset',
    'load_task',
    'make_synthetic_images',
    'make_synthetic_tokens',
    'check_task_compatible',
    'Checkpoint',
    'StepResult',
    'meta_batch_loss',
    'ghn_training_step',
    'make_optimizer',
    'train',
    'Evaluation',
    'FinetuneResult',
    'evaluate',
    'finetune'
]
