"""Prediction, transfer, diversity and recipe workflows."""

from .archive import save_archive, load_archive, file_digest
from .initialize import initialize_from_ghn, compare_initializations, InitComparison
from .transfer import transfer_reinit_head, head_layout
from .diversity import DiversityReport, diversity_report, shape_frequencies
from .recipe import STAGES, RecipeResult, run_recipe, validate_recipe, load_recipe, resolve_spec, build_ghn

__all__ = [
    'save_archive',
    'load_archive',
    'file_digest',
    'initialize_from_ghn',
    'compare_initializations',
    'InitComparison',
    'transfer_reinit_head',
    'head_layout',
    'DiversityReport',
    'diversity_report',
    'shape_frequencies',
    'STAGES',
    'RecipeResult',
    'run_recipe',
    'validate_recipe',
    'load_recipe',
    'resolve_spec',
    'build_ghn'
]
