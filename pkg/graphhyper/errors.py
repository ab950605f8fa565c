"""Exception types for graphhyper."""
from typing import Optional


class GraphHyperError(Exception):
    """Base class for all graphhyper errors."""


class SpecValidationError(GraphHyperError, ValueError):
    """An architecture spec violates its invariants."""


class DatasetGenerationError(GraphHyperError, RuntimeError):
    """Architecture dataset could not be generated (e.g. cap too small)."""


class GraphBuildError(GraphHyperError, ValueError):
    """A computational graph could not be built from a spec."""


class GraphParseError(GraphHyperError, ValueError):
    """A serialized graph record is malformed."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class VocabularyError(GraphHyperError, ValueError):
    """A node carries an operation outside the closed vocabulary."""


class NumericError(GraphHyperError, ArithmeticError):
    """Non-finite values appeared in a forward pass or a loss."""

    def __init__(self, message: str, where: Optional[str] = None):
        self.where = where
        if where is not None:
            message = f"{message} [{where}]"
        super().__init__(message)


class OversizeError(GraphHyperError, ValueError):
    """A tensor's folded dimension exceeds the decoder's max mask K."""

    def __init__(self, name: str, folded: int, max_mask: int):
        self.name = name
        self.folded = folded
        self.max_mask = max_mask
        super().__init__(f"Tensor '{name}' needs folded dim {folded} > max mask {max_mask}")


class ContractViolation(GraphHyperError, ValueError):
    """Arguments violate an operation's contract."""


class ConfigError(GraphHyperError, ValueError):
    """Incompatible configuration (e.g. dataset kind does not match the task)."""


class InitializationError(GraphHyperError, ValueError):
    """A parameter set does not fit the target network."""

    def __init__(self, message: str, tensor: Optional[str] = None):
        self.tensor = tensor
        super().__init__(message)


class StructuralError(GraphHyperError, ValueError):
    """A parameter set lacks a required structural tensor (e.g. the head)."""


class DiversityError(GraphHyperError, ValueError):
    """Not enough usable tensors to measure diversity."""


class RecipeError(GraphHyperError, ValueError):
    """A recipe is malformed or references missing inputs."""


class CheckpointError(GraphHyperError, ValueError):
    """A checkpoint file is missing, corrupt or of an unknown version."""
