"""Low-rank parameter decoder.

Each node's features are mapped by a four-layer MLP to a ``2K x r`` block
holding a factor pair ``A`` (``K x r``) and ``B`` (``r x K``). A target
tensor is realized as ``A[:rows] @ B[:, :cols]`` and reshaped, so every
realized matrix has rank at most ``r`` and any shape up to ``K x K`` is
reachable by slicing.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from graphhyper.encoder.features import NodeFeatureMatrix
from graphhyper.errors import ContractViolation, NumericError, OversizeError

logger = logging.getLogger("graphhyper.decoder.lowrank")


@dataclass(frozen=True)
class DecoderConfig:
    """
    Attributes:
        d: Input feature width
        r: Factor rank
        K: Max mask, the largest folded dimension the factors cover
        num_classes: Output count assumed for classification heads
        chunk_size: Nodes decoded per chunk
    """
    d: int
    r: int
    K: int
    num_classes: int = 1000
    chunk_size: int = 64

    def validate(self) -> "DecoderConfig":
        if self.d < 1 or self.r < 1 or self.K < 1:
            raise ContractViolation(f"Decoder needs d, r, K >= 1 (got d={self.d}, r={self.r}, K={self.K})")
        if self.chunk_size < 1:
            raise ContractViolation(f"chunk_size must be positive, got {self.chunk_size}")
        return self


@dataclass
class LowRankFactors:
    """Factor pairs, batched over nodes: ``A`` is (N, K, r), ``B`` is (N, r, K)."""
    A: torch.Tensor
    B: torch.Tensor

    def __len__(self) -> int:
        return int(self.A.shape[0])

    def node(self, index: int) -> "LowRankFactors":
        """Single-node factors (unbatched ``K x r`` and ``r x K``)."""
        return LowRankFactors(self.A[index], self.B[index])


class LowRankDecoder(nn.Module):
    """Bias-free MLP chain ``d -> 4d -> 8d -> 2r^2``, then ``r -> K``."""

    def __init__(self, d: int, r: int, K: int):
        super().__init__()
        self.d, self.r, self.K = d, r, K
        self.m1 = nn.Linear(d, 4 * d, bias=False)
        self.m2 = nn.Linear(4 * d, 8 * d, bias=False)
        self.m3 = nn.Linear(8 * d, 2 * r * r, bias=False)
        self.m4 = nn.Linear(r, K, bias=False)

    def hidden(self, h: torch.Tensor) -> torch.Tensor:
        """Per-node ``(2r, r)`` block fed to the last layer, already activated."""
        x = self.m3(F.relu(self.m2(F.relu(self.m1(h)))))
        return F.relu(x.view(-1, 2 * self.r, self.r))

    def forward(self, h: torch.Tensor) -> LowRankFactors:
        y = self.m4(self.hidden(h))                                    # (N, 2r, K)
        # Row-major reinterpretation, not a transpose
        view = y.reshape(-1, 2 * self.K, self.r)
        return LowRankFactors(A=view[:, :self.K], B=view[:, self.K:].transpose(1, 2))

    def factor_prefix(self, hidden: torch.Tensor, rows: int, cols: int) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Compute only ``A[:rows]`` and ``B[:, :cols]`` for one node.

        ``A`` occupies the first ``r`` rows of the ``(2r, K)`` block in flat
        order and ``B'`` the last ``r``; a prefix of either needs only the
        leading ``ceil(n * r / K)`` rows of its half.

        Args:
            hidden: The node's activated ``(2r, r)`` block
            rows: Rows of ``A`` needed
            cols: Columns of ``B`` needed

        Returns:
            ``A[:rows]`` (rows x r) and ``B[:, :cols]`` (r x cols)
        """
        return (self._half_prefix(hidden, 0, rows),
                self._half_prefix(hidden, self.r, cols).t())

    def _half_prefix(self, hidden: torch.Tensor, start: int, count: int) -> torch.Tensor:
        n_elems = count * self.r
        n_rows = math.ceil(n_elems / self.K)
        y = self.m4(hidden[start:start + n_rows])
        return y.reshape(-1)[:n_elems].view(count, self.r)


def decoder_param_count(d: int, r: int, K: int) -> int:
    """Closed-form scalar count of ``LowRankDecoder(d, r, K)``."""
    return 4 * d * d + 32 * d * d + 8 * d * 2 * r * r + r * K


def decode_factors(features: NodeFeatureMatrix, weights: LowRankDecoder, chunk_size: int = 0) -> LowRankFactors:
    """
    Decode every node's factor pair.

    Memory grows as ``N * 2K * r``; use ``predict_all`` for large ``K``.

    Args:
        features: Final node features (N x d)
        weights: Decoder weights
        chunk_size: Nodes per chunk (0 decodes all at once)

    Returns:
        Batched factors

    Raises:
        ContractViolation: If the feature width is not ``d``
        NumericError: If a node's factors are non-finite, naming the node
    """
    if features.width != weights.d:
        raise ContractViolation(f"Feature width {features.width} does not match decoder width {weights.d}")
    values = features.values
    step = chunk_size or max(1, len(features))
    parts = [weights(values[i:i + step]) for i in range(0, len(features), step)]
    factors = LowRankFactors(A=torch.cat([p.A for p in parts]), B=torch.cat([p.B for p in parts]))
    bad = ~(torch.isfinite(factors.A).flatten(1).all(1) & torch.isfinite(factors.B).flatten(1).all(1))
    if bad.any():
        raise NumericError("Non-finite decoder output", where=f"node {int(bad.nonzero()[0, 0])}")
    return factors


def realize_matrix(A: torch.Tensor, B: torch.Tensor, max_shape: Tuple[int, int, int, int], n_dim: int) -> torch.Tensor:
    """
    Shape an ``A @ B`` product whose factors are already sliced to the folded dims.

    Args:
        A: ``c_out * k_out`` x r
        B: r x ``c_in * k_in``
        max_shape: ``(c_out, c_in, k_out, k_in)``
        n_dim: 1, 2 or 4

    Returns:
        Realized tensor
    """
    c_out, c_in, k_out, k_in = max_shape
    if n_dim == 1:
        if c_in != 1 or k_out != 1 or k_in != 1:
            raise ContractViolation(f"1-D realization needs c_in = k_out = k_in = 1, got {max_shape}")
        return (A @ B).view(c_out)
    W = A @ B
    if n_dim == 2:
        return W
    if n_dim == 4:
        return W.view(c_out, k_out, c_in, k_in).transpose(1, 2)
    raise ContractViolation(f"n_dim must be 1, 2 or 4, got {n_dim}")


def realize_tensor(factors: LowRankFactors, max_shape: Tuple[int, int, int, int], n_dim: int) -> torch.Tensor:
    """
    Realize one node's tensor from its factor pair.

    Args:
        factors: Single-node factors (``A`` K x r, ``B`` r x K)
        max_shape: ``(c_out, c_in, k_out, k_in)``
        n_dim: 4 gives ``(c_out, c_in, k_out, k_in)``, 2 the folded matrix,
            1 a length-``c_out`` vector

    Returns:
        Realized tensor

    Raises:
        OversizeError: If a folded dim exceeds K
        ContractViolation: If ``n_dim == 1`` with non-unit other dims
    """
    A, B = factors.A, factors.B
    K = A.shape[-2]
    c_out, c_in, k_out, k_in = max_shape
    rows, cols = c_out * k_out, c_in * k_in
    if rows > K or cols > K:
        raise OversizeError("<tensor>", max(rows, cols), K)
    return realize_matrix(A[:rows], B[:, :cols], max_shape, n_dim)
