"""Functional target networks driven by named parameter dictionaries."""

from .vit import vit_forward
from .gpt import gpt_forward
from .registry import parameter_shapes, check_parameters, forward, task_loss, random_init, orth_init

__all__ = [
    'vit_forward',
    'gpt_forward',
    'parameter_shapes',
    'check_parameters',
    'forward',
    'task_loss',
    'random_init',
    'orth_init'
]
