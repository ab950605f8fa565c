"""Parameter decoders: low-rank factors and the tiled baseline."""

from .lowrank import (
    DecoderConfig, LowRankFactors, LowRankDecoder, decoder_param_count,
    decode_factors, realize_matrix, realize_tensor
)
from .tiled import TiledDecoder, tiled_param_count, tile_block, tiled_decode
from .predict import (
    PredictedParameterSet, PREDICTED, FALLBACK, fallback_tensor, post_scale,
    predict_all, predict_all_tiled
)

__all__ = [
    'DecoderConfig',
    'LowRankFactors',
    'LowRankDecoder',
    'decoder_param_count',
    'decode_factors',
    'realize_matrix',
    'realize_tensor',
    'TiledDecoder',
    'tiled_param_count',
    'tile_block',
    'tiled_decode',
    'PredictedParameterSet',
    'PREDICTED',
    'FALLBACK',
    'fallback_tensor',
    'post_scale',
    'predict_all',
    'predict_all_tiled'
]
