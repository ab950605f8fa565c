"""Diversity of predicted parameters: pairwise absolute cosine distance."""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import torch

from graphhyper.decoder.predict import PredictedParameterSet
from graphhyper.errors import DiversityError

logger = logging.getLogger("graphhyper.workflows.diversity")

Shape = Tuple[int, ...]
TensorLike = Union[torch.Tensor, np.ndarray]


@dataclass
class DiversityReport:
    """
    Attributes:
        shape: Queried tensor shape
        names: Tensors that entered the comparison, in order
        pair_count: Number of compared pairs, ``t * (t - 1) / 2``
        mean_abs_cos_distance: Mean of ``1 - |cos|`` over the pairs
        pairs: ``(i, j, distance)`` for every ``i < j``
        excluded: Zero-norm tensors left out
    """
    shape: Shape
    names: List[str]
    pair_count: int
    mean_abs_cos_distance: float
    pairs: List[Tuple[int, int, float]] = field(default_factory=list)
    excluded: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "shape": list(self.shape),
            "tensors": len(self.names),
            "pair_count": self.pair_count,
            "mean_abs_cos_distance": self.mean_abs_cos_distance,
            "excluded": list(self.excluded),
        }


def _as_numpy(value: TensorLike) -> np.ndarray:
    if isinstance(value, torch.Tensor):
        value = value.detach().cpu().numpy()
    return np.asarray(value, dtype=np.float64)


def _select(params: Union[PredictedParameterSet, Mapping[str, TensorLike], Sequence[TensorLike]],
            shape: Optional[Shape]) -> List[Tuple[str, np.ndarray]]:
    if isinstance(params, PredictedParameterSet):
        items = list(params.tensors.items())
    elif isinstance(params, Mapping):
        items = list(params.items())
    else:
        items = [(str(i), t) for i, t in enumerate(params)]
    selected = [(name, _as_numpy(t)) for name, t in items]
    if shape is not None:
        selected = [(name, t) for name, t in selected if t.shape == tuple(shape)]
    return selected


def diversity_report(params: Union[PredictedParameterSet, Mapping[str, TensorLike], Sequence[TensorLike]],
                     shape: Optional[Shape] = None) -> DiversityReport:
    """
    Mean absolute cosine distance over all pairs of same-shape tensors.

    ``distance(u, v) = 1 - |<u, v>| / (|u| |v|)`` on flattened tensors, in
    double precision.

    Args:
        params: A parameter set, a name-to-tensor mapping, or a list of tensors
        shape: Shape to compare; required unless every tensor already has one shape

    Returns:
        The report

    Raises:
        DiversityError: If fewer than two usable tensors have the shape
    """
    selected = _select(params, shape)
    shapes = {t.shape for _, t in selected}
    if shape is None and len(shapes) > 1:
        raise DiversityError(f"Tensors have {len(shapes)} different shapes; pass one to compare")

    kept, excluded = [], []
    for name, t in selected:
        if not np.any(t):
            logger.warning(f"Excluding zero-norm tensor '{name}' from the diversity report")
            excluded.append(name)
        else:
            kept.append((name, t))
    query = tuple(shape) if shape is not None else (next(iter(shapes)) if shapes else ())
    if len(kept) < 2:
        raise DiversityError(f"Need at least two non-zero tensors of shape {query}, found {len(kept)}")

    flat = np.stack([t.ravel() for _, t in kept])
    norms = np.linalg.norm(flat, axis=1)
    cosine = (flat @ flat.T) / np.outer(norms, norms)
    distance = np.clip(1.0 - np.abs(cosine), 0.0, 1.0)
    rows, cols = np.triu_indices(len(kept), k=1)
    values = distance[rows, cols]

    report = DiversityReport(
        shape=query,
        names=[name for name, _ in kept],
        pair_count=len(values),
        mean_abs_cos_distance=float(values.mean()),
        pairs=[(int(i), int(j), float(v)) for i, j, v in zip(rows, cols, values)],
        excluded=excluded,
    )
    logger.info(f"Diversity of {len(kept)} tensors of shape {query}: {report.mean_abs_cos_distance:.4f}")
    return report


def shape_frequencies(params: Union[PredictedParameterSet, Mapping[str, TensorLike]]) -> List[Tuple[Shape, int]]:
    """Tensor shapes by how often they occur, most frequent first."""
    tensors = params.tensors if isinstance(params, PredictedParameterSet) else params
    counts = Counter(tuple(t.shape) for t in tensors.values())
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))
