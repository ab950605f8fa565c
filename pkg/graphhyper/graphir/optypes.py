"""Closed vocabulary of node operation types."""
from enum import Enum
from typing import Dict

from graphhyper.errors import VocabularyError

# Bump whenever a member is added, removed or reordered; checkpoints store it
VOCAB_VERSION = 1


class OpType(Enum):
    """Operation carried by a computational-graph node."""
    TOKEN_EMBEDDING = "token_embedding"
    POSITIONAL_EMBEDDING = "positional_embedding"
    PATCH_PROJECTION = "patch_projection"
    QKV_PROJECTION = "qkv_projection"
    ATTENTION_OUTPUT_PROJECTION = "attention_output_projection"
    MLP_FC1 = "mlp_fc1"
    MLP_FC2 = "mlp_fc2"
    LAYER_NORM_SCALE = "layer_norm_scale"
    LAYER_NORM_SHIFT = "layer_norm_shift"
    BIAS = "bias"
    CLASSIFICATION_HEAD = "classification_head"
    LM_HEAD = "lm_head"
    RESIDUAL_ADD = "residual_add"
    SOFTMAX = "softmax"
    ACTIVATION = "activation"
    INPUT = "input"
    OUTPUT = "output"

    @property
    def index(self) -> int:
        """Row of this op in the node embedding table."""
        return OP_INDEX[self]

    @classmethod
    def from_tag(cls, tag: str) -> "OpType":
        """
        Resolve a serialized tag.

        Raises:
            VocabularyError: If the tag is not in the vocabulary
        """
        try:
            return cls(tag)
        except ValueError:
            raise VocabularyError(f"Unknown op '{tag}' (vocabulary v{VOCAB_VERSION})") from None


OP_INDEX: Dict[OpType, int] = {op: i for i, op in enumerate(OpType)}
VOCAB_SIZE = len(OP_INDEX)

# Ops that never own a learnable tensor
STRUCTURAL_OPS = frozenset({
    OpType.RESIDUAL_ADD, OpType.SOFTMAX, OpType.ACTIVATION, OpType.INPUT, OpType.OUTPUT,
})
