"""
Declarative experiment recipes.

A recipe is a YAML file with an optional ``workdir`` and a list of
``stages``. Every stage names its kind under ``stage``; the remaining keys
are its arguments. Paths are relative to the work directory, and a stage
may only read files that already exist or that an earlier stage writes::

    workdir: runs/demo
    stages:
      - stage: gen-dataset
        kind: vit
        space: vit-tiny
        count: 20
        out: archs.jsonl
      - stage: make-task
        kind: images
        out: task
      - stage: train-ghn
        arch_dataset: archs.jsonl
        task: images
        task_path: task
        variant: custom
        ghn: {d: 16, num_layers: 2, num_heads: 2, r: 8, K: 512}
        train: {epochs: 10, mini_batch: 32}
        out: ghn.pt
"""
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import pandas as pd
import torch
import yaml

from graphhyper.archspace.dataset import ArchDataset, generate_dataset
from graphhyper.archspace.specs import ArchSpec, get_preset, spec_from_dict
from graphhyper.costmodel.counting import count_report
from graphhyper.costmodel.scaling import parse_widths, scaling_table, write_scaling_csv
from graphhyper.errors import RecipeError
from graphhyper.hypernet.network import GraphHyperNetwork
from graphhyper.hypernet.variants import get_variant
from graphhyper.nets.registry import orth_init, random_init
from graphhyper.trainer.config import FinetuneConfig, TrainConfig
from graphhyper.trainer.finetune import finetune
from graphhyper.trainer.loop import train
from graphhyper.trainer.tasks import load_task, make_synthetic_images, make_synthetic_tokens
from graphhyper.workflows.archive import file_digest, load_archive, save_archive
from graphhyper.workflows.diversity import diversity_report, shape_frequencies
from graphhyper.workflows.initialize import initialize_from_ghn
from graphhyper.workflows.transfer import transfer_reinit_head

logger = logging.getLogger("graphhyper.workflows.recipe")

MANIFEST_FILE = "manifest.json"

DEFAULT_CAPS = {"vit": 10_000_000, "gpt2": 30_000_000}


def resolve_spec(args: Dict[str, Any]) -> ArchSpec:
    """
    Target spec from ``preset`` (with optional ``overrides``) or ``arch: {kind, config}``.

    Raises:
        RecipeError: If neither is given
    """
    if "preset" in args:
        return get_preset(args["preset"], **args.get("overrides", {}))
    if "arch" in args:
        return spec_from_dict(args["arch"]["kind"], args["arch"]["config"])
    raise RecipeError("Stage needs a 'preset' or an 'arch' with 'kind' and 'config'")


def build_ghn(variant: str, overrides: Optional[Dict[str, Any]] = None, seed: int = 0) -> GraphHyperNetwork:
    """Freshly initialized hypernetwork; weights depend only on ``seed``."""
    config = get_variant(variant, **(overrides or {}))
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        return GraphHyperNetwork(config)


@dataclass
class RecipeContext:
    workdir: str

    def path(self, relative: str) -> str:
        return os.path.join(self.workdir, relative)


def _gen_dataset(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    kind = args["kind"]
    dataset = generate_dataset(kind, int(args.get("count", 1000)), int(args.get("seed", 0)),
                               int(args.get("cap", DEFAULT_CAPS.get(kind, 10_000_000))),
                               space=args.get("space"), workers=int(args.get("workers", 1)))
    out = ctx.path(args["out"])
    return [out, dataset.save(out)]


def _make_task(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    options = {k: v for k, v in args.items() if k not in ("kind", "out")}
    if args["kind"] == "images":
        task = make_synthetic_images(**options)
    elif args["kind"] == "tokens":
        task = make_synthetic_tokens(**options)
    else:
        raise RecipeError(f"Unknown task kind '{args['kind']}'")
    out = ctx.path(args["out"])
    task.save(out)
    return [out]


def _train_ghn(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    cfg = TrainConfig.from_dict(args.get("train", {}))
    ghn = build_ghn(args.get("variant", "tiny"), args.get("ghn"), seed=cfg.seed)
    arch_dataset = ArchDataset.load(ctx.path(args["arch_dataset"]))
    task = load_task(args["task"], ctx.path(args["task_path"]))
    out = ctx.path(args["out"])
    log = ctx.path(args["log"]) if "log" in args else None
    train(ghn, arch_dataset, task, cfg, out_path=out, log_path=log)
    return [out] + ([log] if log else [])


def _predict(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    out = ctx.path(args["out"])
    initialize_from_ghn(ctx.path(args["checkpoint"]), resolve_spec(args),
                        allow_fallback=args.get("allow_fallback"), out_dir=out)
    return [out]


def _transfer_head(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    params = load_archive(ctx.path(args["params"]))
    out = ctx.path(args["out"])
    save_archive(transfer_reinit_head(params, int(args["num_classes"]), int(args.get("seed", 0))), out)
    return [out]


def _diversity(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    params = load_archive(ctx.path(args["params"]))
    shape = tuple(args["shape"]) if "shape" in args else shape_frequencies(params)[0][0]
    report = diversity_report(params, shape)
    out = ctx.path(args["out"])
    _write_json(out, report.to_dict())
    return [out]


def _finetune(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    if "params" in args:
        params = load_archive(ctx.path(args["params"]))
        spec, tensors = params.arch, params.tensors
    else:
        spec = resolve_spec(args)
        init = orth_init if args.get("init") == "orth" else random_init
        tensors = init(spec, int(args.get("seed", 0)))
    task = load_task(args["task"], ctx.path(args["task_path"]))
    result = finetune(tensors, spec, task, FinetuneConfig.from_dict(args.get("finetune", {})))
    out = ctx.path(args["out"])
    _ensure_parent(out)
    pd.DataFrame([e.to_dict() for e in result.curve]).to_csv(out, index=False)
    return [out]


def _count(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    report = count_report(args["method"], int(args["d"]), args.get("r"), args.get("K"),
                          int(args.get("num_classes", 100)), args.get("encoder_layers"))
    out = ctx.path(args["out"])
    _write_json(out, report.to_dict())
    return [out]


def _scaling(args: Dict[str, Any], ctx: RecipeContext) -> List[str]:
    variant = get_variant(args.get("variant", "tiny"))
    widths = parse_widths(str(args.get("widths", "64..4096")))
    rows = scaling_table(widths, (variant.d, variant.r, variant.K), int(args.get("num_classes", 100)))
    return [write_scaling_csv(rows, ctx.path(args["out"]))]


@dataclass(frozen=True)
class StageKind:
    run: Callable[[Dict[str, Any], RecipeContext], List[str]]
    required: tuple = ("out",)
    inputs: tuple = ()


STAGES: Dict[str, StageKind] = {
    "gen-dataset": StageKind(_gen_dataset, ("kind", "out")),
    "make-task": StageKind(_make_task, ("kind", "out")),
    "train-ghn": StageKind(_train_ghn, ("arch_dataset", "task", "task_path", "out"), ("arch_dataset", "task_path")),
    "predict": StageKind(_predict, ("checkpoint", "out"), ("checkpoint",)),
    "transfer-head": StageKind(_transfer_head, ("params", "num_classes", "out"), ("params",)),
    "diversity": StageKind(_diversity, ("params", "out"), ("params",)),
    "finetune": StageKind(_finetune, ("task", "task_path", "out"), ("params", "task_path")),
    "count": StageKind(_count, ("method", "d", "out")),
    "scaling": StageKind(_scaling, ("out",)),
}


@dataclass
class RecipeResult:
    """Produced files with their hashes, in stage order."""
    workdir: str
    entries: List[Dict[str, str]] = field(default_factory=list)
    manifest_path: Optional[str] = None


def _ensure_parent(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def _write_json(path: str, data: Dict[str, Any]) -> None:
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)


def load_recipe(path: str) -> Dict[str, Any]:
    """
    Read a recipe file.

    Raises:
        RecipeError: If the file is missing or not a recipe mapping
    """
    if not os.path.exists(path):
        raise RecipeError(f"Recipe not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise RecipeError(f"Cannot parse recipe {path}: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("stages", []), list):
        raise RecipeError(f"Recipe {path} must be a mapping with a 'stages' list")
    return data


def validate_recipe(stages: List[Dict[str, Any]], ctx: RecipeContext) -> None:
    """
    Check stage kinds, required arguments and input availability.

    Raises:
        RecipeError: On the first problem found, before anything runs
    """
    produced = set()
    for number, stage in enumerate(stages, start=1):
        if not isinstance(stage, dict) or "stage" not in stage:
            raise RecipeError(f"Stage {number} has no 'stage' key")
        kind = STAGES.get(stage["stage"])
        if kind is None:
            raise RecipeError(f"Stage {number}: unknown stage '{stage['stage']}'. Available: {', '.join(STAGES)}")
        missing = [key for key in kind.required if key not in stage]
        if missing:
            raise RecipeError(f"Stage {number} ({stage['stage']}) is missing {', '.join(missing)}")
        for key in kind.inputs:
            if key not in stage:
                continue
            source = os.path.normpath(stage[key])
            if source not in produced and not os.path.exists(ctx.path(source)):
                raise RecipeError(f"Stage {number} ({stage['stage']}) needs '{stage[key]}', "
                                  f"which neither exists nor is produced by an earlier stage")
        produced.add(os.path.normpath(stage["out"]))


def _hash_entries(stage: str, paths: List[str], workdir: str) -> List[Dict[str, str]]:
    files = []
    for path in paths:
        if os.path.isdir(path):
            for root, _, names in sorted(os.walk(path)):
                files.extend(os.path.join(root, name) for name in sorted(names))
        else:
            files.append(path)
    return [{"stage": stage, "path": os.path.relpath(f, workdir), "sha256": file_digest(f)} for f in files]


def run_recipe(path: str, workdir: Optional[str] = None) -> RecipeResult:
    """
    Execute a recipe's stages in order and write a hashed manifest.

    Args:
        path: Recipe YAML file
        workdir: Overrides the recipe's work directory

    Returns:
        The manifest entries

    Raises:
        RecipeError: If validation fails (no stage has run) or a stage fails
    """
    recipe = load_recipe(path)
    base = os.path.dirname(os.path.abspath(path))
    ctx = RecipeContext(workdir or os.path.join(base, recipe.get("workdir", ".")))
    stages = recipe.get("stages") or []
    validate_recipe(stages, ctx)

    result = RecipeResult(workdir=ctx.workdir)
    os.makedirs(ctx.workdir, exist_ok=True)
    for number, stage in enumerate(stages, start=1):
        args = {k: v for k, v in stage.items() if k != "stage"}
        logger.info(f"Recipe stage {number}/{len(stages)}: {stage['stage']}")
        try:
            outputs = STAGES[stage["stage"]].run(args, ctx)
        except RecipeError:
            raise
        except Exception as e:
            logger.error(f"Stage {number} ({stage['stage']}) failed: {e}", exc_info=True)
            raise RecipeError(f"Stage {number} ({stage['stage']}) failed: {e}") from e
        result.entries.extend(_hash_entries(stage["stage"], outputs, ctx.workdir))

    result.manifest_path = ctx.path(MANIFEST_FILE)
    with open(result.manifest_path, 'w', encoding='utf-8') as f:
        json.dump({"recipe": os.path.basename(path), "artifacts": result.entries}, f, indent=2)
    logger.info(f"Recipe finished: {len(result.entries)} files recorded in {result.manifest_path}")
    return result
