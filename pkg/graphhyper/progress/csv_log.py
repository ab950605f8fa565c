"""CSV sink for progress updates."""

import logging
import os
from typing import Any, Dict, List, Sequence

import pandas as pd

from graphhyper.progress.base import ProgressInfo, ProgressStatus


class CsvLogCallback:
    """
    Collects in-progress metric rows and writes them as CSV.

    Rows are buffered and flushed on completion, on failure, or when
    ``flush()`` is called explicitly (checkpoints). ``restore()`` picks up
    the rows of an earlier run before a resume.
    """

    def __init__(self, path: str, columns: Sequence[str]):
        """
        Initialize the CSV sink.

        Args:
            path: Output CSV path
            columns: Column order; missing metrics are written as empty cells
        """
        self.logger = logging.getLogger("graphhyper.progress.csv")
        self.path = path
        self.columns = list(columns)
        self.rows: List[Dict[str, Any]] = []

    def __call__(self, progress: ProgressInfo) -> None:
        if progress.status == ProgressStatus.IN_PROGRESS:
            row = {"step": progress.step}
            row.update(progress.metrics)
            self.rows.append(row)
        elif progress.status in (ProgressStatus.COMPLETED, ProgressStatus.FAILED):
            self.flush()

    def restore(self, up_to_step: int) -> int:
        """
        Reload rows already on disk so a resumed run continues the same log.

        Args:
            up_to_step: Last step covered by the checkpoint being resumed

        Returns:
            Number of rows kept
        """
        if not os.path.exists(self.path):
            return 0
        frame = pd.read_csv(self.path)
        if "step" not in frame.columns:
            self.logger.warning(f"Ignoring {self.path}: no 'step' column")
            return 0
        kept = frame[frame["step"] <= up_to_step]
        self.rows = kept.to_dict("records") + [row for row in self.rows if row["step"] > up_to_step]
        self.logger.debug(f"Restored {len(kept)} rows from {self.path}")
        return len(kept)

    def flush(self) -> None:
        """Write all buffered rows to disk."""
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame = pd.DataFrame(self.rows, columns=self.columns)
        frame.to_csv(self.path, index=False)
        self.logger.debug(f"Wrote {len(self.rows)} rows to {self.path}")
