"""Progress tracking module for graphhyper."""

from .base import ProgressTracker, ProgressInfo, ProgressCallback, ProgressStatus, logging_callback
from .csv_log import CsvLogCallback

__all__ = [
    'ProgressTracker',
    'ProgressInfo',
    'ProgressCallback',
    'ProgressStatus',
    'logging_callback',
    'CsvLogCallback'
]
