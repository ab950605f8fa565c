"""Progress reporting for dataset generation and training runs."""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional


class ProgressStatus(Enum):
    """Lifecycle of a tracked job."""
    STARTING = "starting"
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class ProgressInfo:
    """
    One progress event.

    Attributes:
        operation: Job name (``gen-dataset``, ``train-ghn``, ...)
        status: Lifecycle stage of the job
        step: Records sampled or optimizer steps taken so far
        total: Planned records or steps, when known
        message: Human-readable status message
        metrics: Per-step numbers such as loss, lr or epoch
        timestamp: Wall-clock time of the event
    """
    operation: str
    status: ProgressStatus
    step: int = 0
    total: Optional[int] = None
    message: str = ""
    metrics: Dict[str, Any] = field(default_factory=dict)
    timestamp: float = field(default_factory=time.time)

    @property
    def percentage(self) -> float:
        """Share of ``total`` done, 0-100; without a total only completion counts."""
        if not self.total:
            return 100.0 if self.status == ProgressStatus.COMPLETED else 0.0
        return min(100.0, 100.0 * self.step / self.total)


ProgressCallback = Callable[[ProgressInfo], None]


class ProgressTracker:
    """
    Emits progress events for one job to its registered callbacks.

    A failing callback is logged and skipped; it never stops the job.
    """

    def __init__(self, operation_name: str, total: Optional[int] = None):
        """
        Initialize the tracker.

        Args:
            operation_name: Job name, also used in the logger name
            total: Planned records or steps, if known
        """
        self.operation_name = operation_name
        self.total = total
        self.callbacks: List[ProgressCallback] = []
        self.started_at: Optional[float] = None
        self.logger = logging.getLogger(f"graphhyper.progress.{operation_name}")

    @property
    def elapsed(self) -> float:
        """Seconds since ``start``, 0 before it."""
        return time.time() - self.started_at if self.started_at else 0.0

    def add_callback(self, callback: ProgressCallback) -> None:
        self.callbacks.append(callback)

    def _emit(self, status: ProgressStatus, step: int, message: str, metrics: Dict[str, Any]) -> None:
        event = ProgressInfo(self.operation_name, status, step, self.total, message, metrics)
        for callback in self.callbacks:
            try:
                callback(event)
            except Exception as e:
                self.logger.error(f"Progress callback failed: {e}", exc_info=True)

    def start(self, message: Optional[str] = None) -> None:
        self.started_at = time.time()
        self._emit(ProgressStatus.STARTING, 0, message or f"Starting {self.operation_name}", {})

    def update(self, step: int, message: Optional[str] = None, **metrics: Any) -> None:
        """
        Report that ``step`` units are done.

        Args:
            step: Records sampled or optimizer steps taken so far
            message: Optional status text
            **metrics: Numbers attached to this step
        """
        self._emit(ProgressStatus.IN_PROGRESS, step, message or "", metrics)

    def complete(self, message: Optional[str] = None, **metrics: Any) -> None:
        text = message or f"{self.operation_name} finished in {self.elapsed:.1f}s"
        self._emit(ProgressStatus.COMPLETED, self.total or 0, text, metrics)

    def fail(self, error_message: str) -> None:
        self._emit(ProgressStatus.FAILED, 0, f"{self.operation_name} failed: {error_message}", {})


def logging_callback(logger: logging.Logger, every: int = 1) -> ProgressCallback:
    """
    Build a callback that writes progress to a logger.

    Args:
        logger: Destination logger
        every: Only log in-progress updates whose step is a multiple of this

    Returns:
        Progress callback
    """
    def _callback(progress: ProgressInfo) -> None:
        if progress.status == ProgressStatus.IN_PROGRESS:
            if every > 1 and progress.step % every != 0:
                return
            numbers = ", ".join(
                f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                for k, v in progress.metrics.items()
            )
            logger.info(f"[{progress.operation}] {progress.step}/{progress.total or '?'} {numbers}".rstrip())
        elif progress.status == ProgressStatus.FAILED:
            logger.error(progress.message)
        else:
            logger.info(progress.message)

    return _callback
