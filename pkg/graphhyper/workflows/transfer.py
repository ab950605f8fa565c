"""Re-initializing the output head for a new label set."""
import logging
from dataclasses import replace
from typing import Dict, NamedTuple, Optional

import numpy as np
import torch

from graphhyper.archspace.specs import ArchSpec, GPTSpec, LinearSpec, ViTSpec
from graphhyper.decoder.predict import FALLBACK, PredictedParameterSet
from graphhyper.errors import ContractViolation, StructuralError

logger = logging.getLogger("graphhyper.workflows.transfer")


class HeadLayout(NamedTuple):
    weight: str
    bias: Optional[str]
    field: str


def head_layout(spec: ArchSpec) -> HeadLayout:
    """Head tensor names and the spec field holding the output count."""
    if isinstance(spec, ViTSpec):
        return HeadLayout("heads.head.weight", "heads.head.bias", "num_classes")
    if isinstance(spec, LinearSpec):
        return HeadLayout("head.weight", "head.bias" if spec.bias else None, "out_features")
    if isinstance(spec, GPTSpec):
        return HeadLayout("lm_head.weight", None, "vocab_size")
    raise StructuralError(f"No output head known for {type(spec).__name__}")


def kaiming_normal(out_features: int, fan_in: int, seed: int) -> np.ndarray:
    """Normal draws with std ``sqrt(2 / fan_in)``."""
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(out_features, fan_in)).astype(np.float32)


def transfer_reinit_head(params: PredictedParameterSet, new_num_classes: int, seed: int = 0) -> PredictedParameterSet:
    """
    Replace the output head with a fresh fan-in-scaled normal draw.

    Every other tensor is carried over unchanged; the head bias (if any)
    starts at zero and the spec's output count is updated.

    Args:
        params: Parameters whose head is replaced
        new_num_classes: Outputs of the new head
        seed: Seed for the head draw

    Returns:
        New parameter set

    Raises:
        StructuralError: If the head tensor is absent (e.g. tied LM heads)
        ContractViolation: If ``new_num_classes`` is not positive, or would
            resize a language model's vocabulary
    """
    if new_num_classes < 1:
        raise ContractViolation(f"new_num_classes must be positive, got {new_num_classes}")
    if params.arch is None:
        raise StructuralError("Parameter set carries no architecture; cannot locate its head")
    layout = head_layout(params.arch)
    if layout.weight not in params:
        raise StructuralError(f"Parameter set has no head tensor '{layout.weight}'")
    if isinstance(params.arch, GPTSpec) and new_num_classes != params.arch.vocab_size:
        raise ContractViolation("Resizing a language-model head would also resize the token embedding")

    old = params[layout.weight]
    fan_in = int(old.shape[1])
    tensors: Dict[str, torch.Tensor] = dict(params.tensors)
    sources = dict(params.sources)
    tensors[layout.weight] = torch.from_numpy(kaiming_normal(new_num_classes, fan_in, seed)).to(old.device)
    sources[layout.weight] = FALLBACK
    if layout.bias is not None:
        tensors[layout.bias] = torch.zeros(new_num_classes, dtype=old.dtype, device=old.device)
        sources[layout.bias] = FALLBACK

    arch = replace(params.arch, **{layout.field: new_num_classes})
    logger.info(f"Re-initialized {layout.weight}: {tuple(old.shape)} -> {(new_num_classes, fan_in)}")
    return PredictedParameterSet(arch, tensors, sources, params.non_predicted)
