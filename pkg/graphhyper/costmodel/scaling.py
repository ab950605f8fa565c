"""Decoder size against the widest target width."""
import logging
import os
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from graphhyper.costmodel.counting import (
    embedding_and_encoder_params, lowrank_decoder_params, tiled_decoder_params
)
from graphhyper.decoder.tiled import SPATIAL
from graphhyper.errors import ContractViolation

logger = logging.getLogger("graphhyper.costmodel.scaling")

SCALING_COLUMNS = ["width", "tiled_params", "lowrank_params", "lowrank_supported"]


@dataclass(frozen=True)
class ScalingRow:
    """
    One width of the scaling curve.

    ``tiled_params`` is an extrapolation: the tiled decoder must be as wide
    as the target to avoid copying, so it is evaluated at ``d = width``.
    ``lowrank_params`` is ``None`` where ``width * 16`` exceeds K.
    """
    width: int
    tiled_params: int
    lowrank_params: Optional[int]
    lowrank_supported: bool
    tiled_encoder_params: Optional[int] = None


def scaling_table(widths: Sequence[int], lowrank_cfg: Tuple[int, int, int], num_classes: int = 100,
                  encoder_layers: Optional[int] = None, encoder_heads: int = 16) -> List[ScalingRow]:
    """
    Tiled vs low-rank decoder size for each target width.

    Args:
        widths: Ascending target widths
        lowrank_cfg: ``(d, r, K)`` of the fixed low-rank decoder
        num_classes: Class-head outputs of the tiled decoder
        encoder_layers: Also report the tiled model's embedding plus encoder size
        encoder_heads: Heads for that estimate

    Returns:
        One row per width

    Raises:
        ContractViolation: If widths are not strictly ascending
    """
    widths = list(widths)
    if any(b <= a for a, b in zip(widths, widths[1:])):
        raise ContractViolation(f"Widths must be strictly ascending, got {widths}")
    d, r, K = lowrank_cfg
    lowrank = lowrank_decoder_params(d, r, K)
    rows = []
    for width in widths:
        supported = width * SPATIAL <= K
        encoder = None
        if encoder_layers is not None and width % encoder_heads == 0:
            encoder = embedding_and_encoder_params(width, encoder_layers, encoder_heads)
        rows.append(ScalingRow(
            width=width,
            tiled_params=tiled_decoder_params(width, num_classes),
            lowrank_params=lowrank if supported else None,
            lowrank_supported=supported,
            tiled_encoder_params=encoder,
        ))
    return rows


def growth_exponent(rows: Sequence[ScalingRow], min_width: int = 0) -> float:
    """
    Log-log slope of the tiled column.

    The exponent approaches 3 only at large widths; over 256..4096 it is about 2.86.

    Args:
        rows: Scaling rows
        min_width: Fit only widths at or above this (the upper octaves give
            the asymptotic exponent; low widths are dominated by the
            quadratic input layer)

    Returns:
        Least-squares slope
    """
    points = [(row.width, row.tiled_params) for row in rows if row.width >= min_width]
    if len(points) < 2:
        raise ContractViolation("Need at least two widths to fit a slope")
    w, p = np.log(np.array(points, dtype=np.float64)).T
    slope, _ = np.polyfit(w, p, 1)
    return float(slope)


def scaling_frame(rows: Sequence[ScalingRow]) -> pd.DataFrame:
    """Rows as a DataFrame; the encoder column appears only when populated."""
    frame = pd.DataFrame([asdict(row) for row in rows])
    columns = list(SCALING_COLUMNS)
    if any(row.tiled_encoder_params is not None for row in rows):
        columns.append("tiled_encoder_params")
    frame = frame[columns]
    frame["lowrank_params"] = frame["lowrank_params"].astype("Int64")
    return frame


def write_scaling_csv(rows: Sequence[ScalingRow], path: str) -> str:
    """Write the scaling table; unsupported low-rank cells are left empty."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    scaling_frame(rows).to_csv(path, index=False)
    logger.info(f"Wrote scaling table ({len(rows)} widths) to {path}")
    return path


def parse_widths(text: str) -> List[int]:
    """
    Parse ``64..4096`` (powers of two between bounds) or ``64,128,256``.

    Raises:
        ContractViolation: On malformed input
    """
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            if lo < 1 or hi < lo:
                raise ValueError(text)
            widths = []
            w = lo
            while w <= hi:
                widths.append(w)
                w *= 2
            return widths
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ContractViolation(f"Cannot parse widths '{text}'") from e


def parse_lowrank(text: str) -> Tuple[int, int, int]:
    """
    Parse a ``d,r,K`` triple.

    Raises:
        ContractViolation: On malformed input or non-positive values
    """
    try:
        d, r, K = (int(part) for part in text.split(","))
    except ValueError as e:
        raise ContractViolation(f"Expected --lowrank as d,r,K, got '{text}'") from e
    if min(d, r, K) < 1:
        raise ContractViolation(f"Low-rank d, r and K must be >= 1, got '{text}'")
    return d, r, K
