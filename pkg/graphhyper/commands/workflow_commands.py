"""Prediction, transfer, diversity and recipe commands."""
import argparse
import json
import logging
from typing import Optional, Tuple

import pandas as pd

from graphhyper.archspace.specs import get_preset
from graphhyper.core.command_registry import CommandRegistry, CommandResult
from graphhyper.trainer.tasks import load_task
from graphhyper.utils.config_manager import ConfigManager
from graphhyper.workflows.archive import load_archive, save_archive
from graphhyper.workflows.diversity import diversity_report, shape_frequencies
from graphhyper.workflows.initialize import compare_initializations, initialize_from_ghn
from graphhyper.workflows.recipe import run_recipe
from graphhyper.workflows.transfer import transfer_reinit_head


def parse_shape(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    """``384x384`` or ``384,384`` to a tuple."""
    if not text:
        return None
    return tuple(int(part) for part in text.replace("x", ",").split(",") if part.strip())


class WorkflowCommands:
    """
    Workflow command handlers.

    Predict parameter archives from a checkpoint, re-initialize heads for
    transfer, measure diversity and run experiment recipes.
    """

    def __init__(self, config: ConfigManager):
        """
        Initialize workflow commands.

        Args:
            config: Configuration manager
        """
        self.logger = logging.getLogger("graphhyper.commands.workflow")
        self.config = config

    def register_commands(self, registry: CommandRegistry) -> None:
        """
        Register workflow commands with the command registry.

        Args:
            registry: Command registry instance
        """
        registry.register_command(
            name="predict",
            callback=self.predict_command,
            description="Predict a full parameter archive for a preset architecture",
            configure=self._configure_predict,
            usage_examples=[
                "graphhyper predict --checkpoint runs/ghn.pt --preset vit-s --out runs/vit-s-pred",
                "graphhyper predict --checkpoint runs/ghn.pt --preset gpt2-m --no-fallback --out runs/gpt2m",
            ]
        )
        registry.register_command(
            name="transfer-head",
            callback=self.transfer_head_command,
            description="Re-initialize the output head of an archive for a new label count",
            configure=self._configure_transfer,
            usage_examples=["graphhyper transfer-head --params runs/vit-s-pred --num-classes 1000 --out runs/vit-s-1k"]
        )
        registry.register_command(
            name="diversity",
            callback=self.diversity_command,
            description="Mean absolute cosine distance between same-shape tensors of an archive",
            configure=self._configure_diversity,
            usage_examples=[
                "graphhyper diversity --params runs/vit-s-pred --shape 384x384",
                "graphhyper diversity --params runs/vit-s-pred --list-shapes",
            ]
        )
        registry.register_command(
            name="compare-init",
            callback=self.compare_init_command,
            description="Step-0 task loss of predicted vs random initialization",
            configure=self._configure_compare,
            usage_examples=["graphhyper compare-init --checkpoint runs/ghn.pt --preset vit-s --task images "
                            "--task-path data/images --seeds 0 1 2 3 4"]
        )
        registry.register_command(
            name="recipe",
            callback=self.recipe_command,
            description="Run a YAML experiment recipe and write a hashed manifest",
            configure=self._configure_recipe,
            usage_examples=["graphhyper recipe recipes/desk.yaml --workdir runs/desk"]
        )

        self.logger.debug("Workflow commands registered")

    def _configure_predict(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--checkpoint", required=True)
        parser.add_argument("--preset", required=True)
        parser.add_argument("--num-classes", type=int, default=None, help="Override the preset's class count")
        parser.add_argument("--no-fallback", action="store_true", help="Fail on tensors wider than K")
        parser.add_argument("--out", required=True)

    def _configure_transfer(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--params", required=True)
        parser.add_argument("--num-classes", type=int, required=True)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", required=True)

    def _configure_diversity(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--params", required=True)
        parser.add_argument("--shape", default=None, help="Tensor shape such as 384x384 (default: most frequent)")
        parser.add_argument("--list-shapes", action="store_true")
        parser.add_argument("--out", default=None, help="Per-pair CSV")

    def _configure_compare(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--checkpoint", required=True)
        parser.add_argument("--preset", required=True)
        parser.add_argument("--task", required=True, choices=["images", "tokens"])
        parser.add_argument("--task-path", required=True)
        parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
        parser.add_argument("--out", default=None)

    def _configure_recipe(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("recipe")
        parser.add_argument("--workdir", default=None)

    def _preset(self, args: argparse.Namespace):
        overrides = {}
        if getattr(args, "num_classes", None):
            overrides["num_classes"] = args.num_classes
        return get_preset(args.preset, **overrides)

    def predict_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Write a predicted parameter archive.

        Returns:
            Tuple of (success, PredictedParameterSet, error message)
        """
        allow = False if args.no_fallback else None
        params = initialize_from_ghn(args.checkpoint, self._preset(args), allow_fallback=allow, out_dir=args.out)
        self.logger.info(f"✅ {len(params)} tensors ({params.num_parameters():,} values) written to {args.out}")
        if params.fallback_report:
            self.logger.info(f"   Fallback init: {', '.join(params.fallback_report)}")
        return True, params, None

    def transfer_head_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Re-initialize an archive's head.

        Returns:
            Tuple of (success, PredictedParameterSet, error message)
        """
        params = transfer_reinit_head(load_archive(args.params), args.num_classes, args.seed)
        save_archive(params, args.out)
        return True, params, None

    def diversity_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Report diversity for one tensor shape.

        Returns:
            Tuple of (success, DiversityReport or shape list, error message)
        """
        params = load_archive(args.params)
        frequencies = shape_frequencies(params)
        if args.list_shapes:
            for shape, count in frequencies:
                self.logger.info(f"   {'x'.join(map(str, shape)):>16}: {count}")
            return True, frequencies, None

        shape = parse_shape(args.shape) or frequencies[0][0]
        report = diversity_report(params, shape)
        print(json.dumps(report.to_dict(), indent=2))
        if args.out:
            pd.DataFrame(report.pairs, columns=["i", "j", "distance"]).to_csv(args.out, index=False)
        return True, report, None

    def compare_init_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Compare predicted and random initialization.

        Returns:
            Tuple of (success, comparison rows, error message)
        """
        rows = compare_initializations(self._preset(args), args.checkpoint,
                                       load_task(args.task, args.task_path), args.seeds)
        frame = pd.DataFrame([{"seed": r.seed, "predicted_loss": r.predicted_loss, "random_loss": r.random_loss}
                              for r in rows])
        self.logger.info(f"\n{frame.to_string(index=False)}")
        if args.out:
            frame.to_csv(args.out, index=False)
        return True, rows, None

    def recipe_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Run a recipe.

        Returns:
            Tuple of (success, RecipeResult, error message)
        """
        result = run_recipe(args.recipe, workdir=args.workdir)
        self.logger.info(f"✅ Recipe produced {len(result.entries)} files; manifest {result.manifest_path}")
        return True, result, None
