"""Architecture dataset generation (JSON-lines records plus histogram)."""
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Union

import numpy as np
import pandas as pd

from graphhyper.archspace.counting import spec_param_count
from graphhyper.archspace.sampler import SearchSpace, get_search_space, sample_spec
from graphhyper.archspace.specs import ArchSpec, spec_from_dict
from graphhyper.errors import ContractViolation, DatasetGenerationError
from graphhyper.progress.base import ProgressCallback, ProgressTracker

logger = logging.getLogger("graphhyper.archspace.dataset")

HISTOGRAM_BUCKET = 1_000_000


@dataclass(frozen=True)
class ArchRecord:
    """One sampled architecture."""
    id: str
    kind: str
    seed: int
    spec: ArchSpec
    param_count: int

    def to_json(self) -> str:
        """Serialize to one JSON line (no trailing newline)."""
        return json.dumps({
            "id": self.id,
            "kind": self.kind,
            "seed": self.seed,
            "config": self.spec.to_dict(),
            "param_count": self.param_count,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "ArchRecord":
        """Parse one JSON line."""
        data = json.loads(line)
        spec = spec_from_dict(data["kind"], data["config"])
        return cls(id=data["id"], kind=data["kind"], seed=int(data["seed"]),
                   spec=spec, param_count=int(data["param_count"]))


@dataclass(frozen=True)
class HistogramBucket:
    """Half-open parameter-count interval [lo, hi) and its record count."""
    lo: int
    hi: int
    count: int


@dataclass
class ArchDataset:
    """An ordered, reproducible collection of sampled architectures."""
    kind: str
    records: List[ArchRecord]
    cap: int
    seed: int = 0
    space: str = ""
    histogram_bucket: int = field(default=HISTOGRAM_BUCKET)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[ArchRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> ArchRecord:
        return self.records[index]

    @property
    def specs(self) -> List[ArchSpec]:
        """Specs in record order."""
        return [record.spec for record in self.records]

    def max_param_count(self) -> int:
        """Largest record parameter count."""
        return max(record.param_count for record in self.records)

    def histogram(self, bucket: Optional[int] = None) -> List[HistogramBucket]:
        """
        Bucketed parameter-count distribution.

        Buckets span from the bucket holding the smallest record to the one
        holding the largest; empty buckets in between are reported with 0.

        Args:
            bucket: Bucket width in parameters (defaults to 1M)

        Returns:
            List of buckets in ascending order
        """
        width = bucket or self.histogram_bucket
        counts = np.array([record.param_count for record in self.records], dtype=np.int64)
        if counts.size == 0:
            return []
        index = counts // width
        first = int(index.min())
        tallies = np.bincount(index - first)
        return [
            HistogramBucket(lo=(first + i) * width, hi=(first + i + 1) * width, count=int(c))
            for i, c in enumerate(tallies)
        ]

    def save(self, path: str, histogram_path: Optional[str] = None) -> str:
        """
        Write records as JSON lines plus a histogram CSV sidecar.

        Args:
            path: Output JSON-lines path
            histogram_path: Sidecar path (defaults to ``<path stem>.hist.csv``)

        Returns:
            Path of the histogram sidecar
        """
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            for record in self.records:
                f.write(record.to_json() + "\n")

        histogram_path = histogram_path or f"{os.path.splitext(path)[0]}.hist.csv"
        frame = pd.DataFrame(
            [(b.lo, b.hi, b.count) for b in self.histogram()],
            columns=["bucket_lo", "bucket_hi", "count"],
        )
        frame.to_csv(histogram_path, index=False)
        logger.info(f"Saved {len(self.records)} {self.kind} records to {path} (histogram: {histogram_path})")
        return histogram_path

    @classmethod
    def load(cls, path: str, cap: Optional[int] = None) -> "ArchDataset":
        """
        Read a JSON-lines dataset file.

        Args:
            path: Dataset path
            cap: Cap to record (defaults to the largest record count)

        Returns:
            The dataset

        Raises:
            FileNotFoundError: If the file does not exist
            DatasetGenerationError: If records mix kinds or the file is empty
        """
        records = []
        with open(path, 'r', encoding='utf-8') as f:
            for line_no, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(ArchRecord.from_json(line))
                except (ValueError, KeyError) as e:
                    raise DatasetGenerationError(f"Bad record on line {line_no} of {path}: {e}") from e
        if not records:
            raise DatasetGenerationError(f"Dataset {path} has no records")
        kinds = {record.kind for record in records}
        if len(kinds) != 1:
            raise DatasetGenerationError(f"Dataset {path} mixes kinds: {sorted(kinds)}")
        dataset = cls(kind=records[0].kind, records=records, cap=0)
        dataset.cap = cap if cap is not None else dataset.max_param_count()
        logger.info(f"Loaded {len(records)} {dataset.kind} records from {path}")
        return dataset


def record_seed(seed: int, index: int) -> int:
    """Derive the per-record seed from the global seed and record index."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def sample_record(space: SearchSpace, seed: int, index: int, cap: int, max_attempts: int = 1000) -> ArchRecord:
    """
    Sample one record, rejection-resampling specs over the cap.

    Args:
        space: Search space
        seed: Global seed
        index: Record index
        cap: Parameter budget
        max_attempts: Retry bound

    Returns:
        Record whose parameter count is within the cap

    Raises:
        DatasetGenerationError: If no spec fits after ``max_attempts`` draws
    """
    rs = record_seed(seed, index)
    rng = np.random.default_rng(rs)
    for _ in range(max_attempts):
        spec = sample_spec(rng, space)
        count = spec_param_count(spec)
        if count <= cap:
            return ArchRecord(id=f"{spec.kind}-{index:05d}", kind=spec.kind, seed=rs, spec=spec, param_count=count)
    raise DatasetGenerationError(
        f"No {space.name} spec within cap {cap:,} after {max_attempts} attempts (record {index})"
    )


def generate_dataset(
    kind: str,
    n: int,
    seed: int,
    cap: int,
    space: Optional[Union[str, SearchSpace]] = None,
    workers: int = 1,
    max_attempts: int = 1000,
    progress_callback: Optional[ProgressCallback] = None
) -> ArchDataset:
    """
    Generate ``n`` capped architectures of one family.

    Args:
        kind: ``vit`` or ``gpt2``
        n: Number of records
        seed: Global seed
        cap: Parameter budget per record
        space: Search space or its name (defaults to ``kind``)
        workers: Thread count; output order does not depend on it
        max_attempts: Retry bound per record
        progress_callback: Optional progress sink

    Returns:
        The generated dataset

    Raises:
        ContractViolation: If ``n < 1`` or ``cap <= 0``
        DatasetGenerationError: If the cap admits no spec
    """
    if n < 1:
        raise ContractViolation(f"Dataset size must be at least 1, got {n}")
    if cap <= 0:
        raise ContractViolation(f"Parameter cap must be positive, got {cap}")

    if space is None or isinstance(space, str):
        space = get_search_space(space or kind)
    expected_kind = "vit" if space.name.startswith("vit") else "gpt2"
    if expected_kind != kind:
        raise ContractViolation(f"Search space '{space.name}' does not produce {kind} architectures")

    tracker = ProgressTracker("gen-dataset", total=n)
    if progress_callback:
        tracker.add_callback(progress_callback)
    tracker.start(f"Sampling {n} {kind} architectures (seed={seed}, cap={cap:,})")

    def _sample(index: int) -> ArchRecord:
        return sample_record(space, seed, index, cap, max_attempts)

    records: List[ArchRecord] = []
    try:
        if workers > 1:
            # map yields in index order as records finish
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for record in pool.map(_sample, range(n)):
                    records.append(record)
                    tracker.update(len(records))
        else:
            for index in range(n):
                records.append(_sample(index))
                tracker.update(index + 1)
    except DatasetGenerationError as e:
        tracker.fail(str(e))
        raise

    dataset = ArchDataset(kind=kind, records=records, cap=cap, seed=seed, space=space.name)
    largest = dataset.max_param_count()
    assert largest <= cap, f"record over cap: {largest} > {cap}"

    buckets = dataset.histogram()
    logger.info(f"Generated {n} {kind} records; largest has {largest:,} parameters")
    for b in buckets:
        logger.debug(f"  [{b.lo / 1e6:.0f}M, {b.hi / 1e6:.0f}M): {b.count}")
    tracker.complete(f"Generated {n} {kind} architectures across {len(buckets)} buckets")
    return dataset
