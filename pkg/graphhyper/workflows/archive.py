"""Named-tensor archives: raw little-endian float32 files plus a JSON manifest."""
import hashlib
import json
import logging
import os
from typing import Any, Dict

import numpy as np
import torch

from graphhyper.archspace.specs import spec_from_dict
from graphhyper.decoder.predict import PREDICTED, PredictedParameterSet
from graphhyper.errors import InitializationError

logger = logging.getLogger("graphhyper.workflows.archive")

MANIFEST = "manifest.json"
ARCHIVE_VERSION = 1
DTYPE = "<f4"


def file_digest(path: str) -> str:
    """sha256 of a file's contents."""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def save_archive(params: PredictedParameterSet, path: str) -> Dict[str, Any]:
    """
    Write a parameter set as one ``<name>.f4`` file per tensor plus ``manifest.json``.

    Args:
        params: Tensors to write
        path: Archive directory (created if needed)

    Returns:
        The manifest
    """
    os.makedirs(path, exist_ok=True)
    entries = []
    for name, tensor in params.tensors.items():
        filename = f"{name}.f4"
        file_path = os.path.join(path, filename)
        tensor.detach().cpu().numpy().astype(DTYPE).tofile(file_path)
        entries.append({
            "name": name,
            "file": filename,
            "shape": list(tensor.shape),
            "source": params.sources.get(name, PREDICTED),
            "sha256": file_digest(file_path),
        })

    manifest = {
        "version": ARCHIVE_VERSION,
        "dtype": DTYPE,
        "arch": {"kind": params.arch.kind, "config": params.arch.to_dict()} if params.arch else None,
        "tensors": entries,
        "non_predicted": list(params.non_predicted),
        "fallback": params.fallback_report,
    }
    with open(os.path.join(path, MANIFEST), 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2)
    logger.info(f"Wrote {len(entries)} tensors to {path} ({len(params.fallback_report)} fallback)")
    return manifest


def load_archive(path: str, verify: bool = True) -> PredictedParameterSet:
    """
    Read an archive written by ``save_archive``.

    Raises:
        FileNotFoundError: If the manifest is missing
        InitializationError: If a tensor file is truncated or fails its hash check
    """
    with open(os.path.join(path, MANIFEST), 'r', encoding='utf-8') as f:
        manifest = json.load(f)

    tensors: Dict[str, torch.Tensor] = {}
    sources: Dict[str, str] = {}
    for entry in manifest["tensors"]:
        name = entry["name"]
        file_path = os.path.join(path, entry["file"])
        if verify and file_digest(file_path) != entry["sha256"]:
            raise InitializationError(f"Tensor '{name}' does not match its manifest hash", tensor=name)
        values = np.fromfile(file_path, dtype=manifest.get("dtype", DTYPE))
        shape = tuple(entry["shape"])
        if values.size != int(np.prod(shape, dtype=np.int64)):
            raise InitializationError(f"Tensor '{name}' has {values.size} values, expected shape {shape}",
                                      tensor=name)
        tensors[name] = torch.from_numpy(values.astype(np.float32).reshape(shape))
        sources[name] = entry.get("source", PREDICTED)

    arch = manifest.get("arch")
    spec = spec_from_dict(arch["kind"], arch["config"]) if arch else None
    logger.debug(f"Loaded {len(tensors)} tensors from {path}")
    return PredictedParameterSet(spec, tensors, sources, tuple(manifest.get("non_predicted", ())))
