"""Closed-form decoder parameter counts.

All arithmetic is on Python integers, so results are exact at any width.
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from graphhyper.decoder.tiled import SPATIAL
from graphhyper.encoder.graphormer import EncoderConfig, encoder_param_count
from graphhyper.errors import ContractViolation
from graphhyper.graphir.optypes import VOCAB_SIZE
from graphhyper.hypernet.variants import LOWRANK, TILED


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ContractViolation(message)


def tiled_decoder_terms(d: int, num_classes: int) -> Dict[str, int]:
    """Per-layer breakdown of the tiled decoder's count."""
    _require(d >= 1 and num_classes >= 0, f"Need d >= 1 and num_classes >= 0 (got d={d}, num_classes={num_classes})")
    mlp_d1, mlp_d2 = 4 * d, 8 * d
    return {
        "input_layer": d * mlp_d1 * SPATIAL * SPATIAL,
        "hidden_layer": mlp_d1 * mlp_d2,
        "output_layer": mlp_d2 * d * d,
        "class_head": d * num_classes,
    }


def lowrank_decoder_terms(d: int, r: int, K: int) -> Dict[str, int]:
    """Per-layer breakdown of the low-rank decoder's count."""
    _require(d >= 1 and r >= 0 and K >= 1, f"Need d, K >= 1 and r >= 0 (got d={d}, r={r}, K={K})")
    return {
        "m1": d * 4 * d,
        "m2": 4 * d * 8 * d,
        "m3": 8 * d * 2 * r * r,
        "m4": r * K,
    }


def tiled_decoder_params(d: int, num_classes: int) -> int:
    """
    Scalars in the tiled decoder: ``4d^2*256 + 32d^2 + 8d^3 + d*num_classes``.

    Args:
        d: Hypernetwork width (also the widest supported target width)
        num_classes: Class-head outputs

    Returns:
        Exact count
    """
    return sum(tiled_decoder_terms(d, num_classes).values())


def lowrank_decoder_params(d: int, r: int, K: int) -> int:
    """
    Scalars in the low-rank decoder: ``4d^2 + 32d^2 + 16d*r^2 + r*K``.

    Args:
        d: Hypernetwork width
        r: Factor rank (0 gives the MLP-only degenerate count)
        K: Max mask

    Returns:
        Exact count
    """
    return sum(lowrank_decoder_terms(d, r, K).values())


def param_delta(d: int, r: int, K: Optional[int], num_classes: int, c_out: int, h: int) -> int:
    """
    Tiled minus low-rank decoder size with ``K = c_out * h``.

    Args:
        d: Width
        r: Rank
        K: Max mask; must equal ``c_out * h`` when given
        num_classes: Class-head outputs
        c_out: Widest output channel count covered
        h: Kernel height

    Returns:
        ``4d^2*255 + 8d*(d^2 - 2r^2) + d*num_classes - r*c_out*h``
    """
    if K is not None:
        _require(K == c_out * h, f"K={K} must equal c_out*h={c_out * h}")
    _require(d >= 1 and r >= 0 and c_out >= 0 and h >= 0, "Delta inputs must be non-negative, d positive")
    return 4 * d * d * (SPATIAL * SPATIAL - 1) + 8 * d * (d * d - 2 * r * r) + d * num_classes - r * c_out * h


def delta1(d: int) -> int:
    """Leading-order gap between the decoders' first and last terms, ``16d(64d - 1024)``."""
    _require(d >= 1, f"Need d >= 1, got {d}")
    return 16 * d * (64 * d - 1024)


def embedding_and_encoder_params(d: int, num_layers: int, num_heads: int,
                                 max_distance: int = 8, max_degree: int = 32) -> int:
    """Node embedding plus Graphormer encoder scalars (decoder excluded)."""
    cfg = EncoderConfig(d=d, num_layers=num_layers, num_heads=num_heads,
                        max_distance=max_distance, max_degree=max_degree).validate()
    return VOCAB_SIZE * d + encoder_param_count(cfg)


@dataclass
class CountReport:
    """Decoder count with its term-by-term breakdown."""
    method: str
    d: int
    r: Optional[int]
    K: Optional[int]
    num_classes: Optional[int]
    decoder_params: int
    notes: Dict[str, int] = field(default_factory=dict)
    encoder_params: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def count_report(method: str, d: int, r: Optional[int] = None, K: Optional[int] = None,
                 num_classes: int = 100, encoder_layers: Optional[int] = None,
                 encoder_heads: int = 8) -> CountReport:
    """
    Build a CountReport for either decoder.

    Args:
        method: ``tiled`` or ``lowrank``
        d: Width
        r: Rank (low-rank only)
        K: Max mask (low-rank only)
        num_classes: Class-head outputs (tiled only)
        encoder_layers: When given, also estimate embedding plus encoder size
        encoder_heads: Heads used for that estimate

    Raises:
        ContractViolation: On an unknown method or missing arguments
    """
    if method == TILED:
        terms = tiled_decoder_terms(d, num_classes)
        report = CountReport(TILED, d, None, None, num_classes, sum(terms.values()), terms)
    elif method == LOWRANK:
        _require(r is not None and K is not None, "The low-rank count needs r and K")
        terms = lowrank_decoder_terms(d, r, K)
        report = CountReport(LOWRANK, d, r, K, None, sum(terms.values()), terms)
    else:
        raise ContractViolation(f"Unknown method '{method}' (expected '{TILED}' or '{LOWRANK}')")
    if encoder_layers is not None:
        report.encoder_params = embedding_and_encoder_params(d, encoder_layers, encoder_heads)
    return report
