"""Architecture specs, samplers and training datasets."""

from .specs import ViTSpec, GPTSpec, LinearSpec, ArchSpec, PRESETS, get_preset, spec_from_dict
from .counting import spec_param_count
from .sampler import (
    ViTSearchSpace, GPTSearchSpace, WidthBranch, SEARCH_SPACES, get_search_space,
    sample_vit_spec, sample_gpt_spec, sample_spec
)
from .dataset import ArchDataset, ArchRecord, HistogramBucket, generate_dataset

__all__ = [
    'ViTSpec',
    'GPTSpec',
    'LinearSpec',
    'ArchSpec',
    'PRESETS',
    'get_preset',
    'spec_from_dict',
    'spec_param_count',
    'ViTSearchSpace',
    'GPTSearchSpace',
    'WidthBranch',
    'SEARCH_SPACES',
    'get_search_space',
    'sample_vit_spec',
    'sample_gpt_spec',
    'sample_spec',
    'ArchDataset',
    'ArchRecord',
    'HistogramBucket',
    'generate_dataset'
]
