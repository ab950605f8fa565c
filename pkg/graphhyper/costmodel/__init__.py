"""Parameter-count cost model."""

from .counting import (
    CountReport, count_report, tiled_decoder_params, lowrank_decoder_params,
    param_delta, delta1, embedding_and_encoder_params
)
from .scaling import ScalingRow, scaling_table, growth_exponent, write_scaling_csv, parse_widths

__all__ = [
    'CountReport',
    'count_report',
    'tiled_decoder_params',
    'lowrank_decoder_params',
    'param_delta',
    'delta1',
    'embedding_and_encoder_params',
    'ScalingRow',
    'scaling_table',
    'growth_exponent',
    'write_scaling_csv',
    'parse_widths'
]
