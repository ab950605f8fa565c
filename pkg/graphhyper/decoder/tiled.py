"""Tiled baseline decoder.

Every node gets one fixed ``d x d x 16 x 16`` block. Wider targets repeat
the block along the channel axes and every target is then sliced to size,
so the decoder's size grows with ``d**3`` to reach a given width.
"""
import math
from typing import Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from graphhyper.errors import ContractViolation

SPATIAL = 16


class TiledDecoder(nn.Module):
    """Bias-free MLP producing a ``(d, d, 16, 16)`` block per node, plus a class head."""

    def __init__(self, d: int, num_classes: int, spatial: int = SPATIAL):
        super().__init__()
        self.d, self.num_classes, self.spatial = d, num_classes, spatial
        self.m1 = nn.Linear(d, 4 * d * spatial * spatial, bias=False)
        self.m2 = nn.Linear(4 * d, 8 * d, bias=False)
        self.m3 = nn.Linear(8 * d, d * d, bias=False)
        self.class_head = nn.Linear(d, num_classes, bias=False) if num_classes else None

    def forward(self, h: torch.Tensor) -> torch.Tensor:
        n, d, s = h.shape[0], self.d, self.spatial
        x = F.relu(self.m1(h)).view(n, 4 * d, s * s).transpose(1, 2)    # (N, s*s, 4d)
        x = self.m3(F.relu(self.m2(x)))                                  # (N, s*s, d*d)
        return x.transpose(1, 2).reshape(n, d, d, s, s)

    def class_rows(self, block: torch.Tensor) -> torch.Tensor:
        """Head weight ``(num_classes, d)`` read through the top-left spatial position of ``block``."""
        return self.class_head(block[:, :, 0, 0].t()).t()


def tiled_param_count(d: int, num_classes: int, spatial: int = SPATIAL) -> int:
    """Closed-form scalar count of ``TiledDecoder(d, num_classes)``."""
    return 4 * d * d * spatial * spatial + 32 * d * d + 8 * d * d * d + d * num_classes


def tile_block(block: torch.Tensor, target_shape: Tuple[int, int, int, int]) -> torch.Tensor:
    """
    Repeat ``block`` (d_out, d_in, s, s) along channels and slice to ``target_shape``.

    Raises:
        ContractViolation: If the target's spatial size exceeds the block face
    """
    c_out, c_in, h, w = target_shape
    d_out, d_in, s_h, s_w = block.shape
    if h > s_h or w > s_w:
        raise ContractViolation(f"Spatial size {h}x{w} exceeds the {s_h}x{s_w} block face")
    tiled = block.repeat(math.ceil(c_out / d_out), math.ceil(c_in / d_in), 1, 1)
    return tiled[:c_out, :c_in, :h, :w]


def tiled_decode(feature_row: torch.Tensor, baseline: TiledDecoder,
                 target_shape: Tuple[int, int, int, int], head: bool = False) -> torch.Tensor:
    """
    Realize one tensor with the tiled decoder.

    Args:
        feature_row: Node features (d,)
        baseline: Tiled decoder weights
        target_shape: ``(c_out, c_in, h, w)``
        head: Route through the class head (classification layers whose
            output count fits ``num_classes``)

    Returns:
        Tensor of exactly ``target_shape``
    """
    block = baseline(feature_row.view(1, -1))[0]
    c_out, c_in, h, w = target_shape
    if head and baseline.class_head is not None and c_out <= baseline.num_classes and h == w == 1:
        rows = baseline.class_rows(block)
        return rows.repeat(1, math.ceil(c_in / baseline.d))[:c_out, :c_in].view(c_out, c_in, 1, 1)
    return tile_block(block, target_shape)
